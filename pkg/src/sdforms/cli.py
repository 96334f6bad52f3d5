"""Command-line verification pipelines and report emission.

Subcommands
-----------
spectrum     eigenvalue/multiplicity report of *d on divergence-free fields
evolve       Runge-Kutta evolution of an initial field from a JSON file,
             cross-checked against the spectral propagator
verify       fixed named check suites: frames | hodge | kato | orthogonality
             | elliptic
ale-report   curvature, asymptotics, energy and decay report of the 2-ended
             model
moser        sweep of the iteration product ratio against its claimed bound
decay        decay classification of one end of the 2-ended model

All reports are JSON on stdout (floats fixed to 12 significant digits, keys
sorted, so identical configurations give byte-identical output).  Sampling
is seeded and the seed is recorded in the report.  Exit codes: 0 all checks
passed, 1 at least one failure (machine-readable failure records in the
report), 2 usage errors.  A JSON config file with a schema_version field
supplies per-subcommand defaults; explicit flags win over the file.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import ale, evolution, regularity, selfdual, spectrum
from .frames import hodge_star_s3, left_frame_at, right_frame_at, structure_residual
from .polys import left_invariant_coframe, right_invariant_coframe, sphere_integral

__all__ = ["main", "dispatch"]

DEFAULT_SEED = 20240817
CONFIG_SCHEMA_VERSION = 1
KATO_BOUND = 2.0 / 3.0 + 1e-6
KATO_DEFAULT_H = 1e-4


def _round_floats(obj, digits=12):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.{digits}e}")
        return obj
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj), digits)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _emit(report, output=None, name=None):
    blob = json.dumps(_round_floats(report), indent=1, sort_keys=True)
    print(blob)
    if output and name:
        import os

        os.makedirs(output, exist_ok=True)
        with open(os.path.join(output, name), "w") as fh:
            fh.write(blob + "\n")


def _failure(module, operation, inputs, observed, tolerance, reason):
    return {
        "module": module,
        "operation": operation,
        "input": inputs,
        "observed": observed,
        "tolerance": tolerance,
        "reason": reason,
    }


def _sphere_samples(n, seed):
    rng = np.random.default_rng(seed)
    p = rng.standard_normal((n, 4))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def _annulus_samples(n, seed, lo=0.4, hi=2.5):
    rng = np.random.default_rng(seed)
    p = rng.standard_normal((n, 4))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    return p * rng.uniform(lo, hi, size=(n, 1))


# ------------------------------------------------------------- subcommands

def cmd_spectrum(args):
    modes, report = spectrum.eigen_decompose(
        args.degree, ring="exact" if args.exact else "float")
    failures = report.verify()
    out = report.to_json()
    out["seed"] = args.seed
    out["status"] = "pass" if not failures else "fail"
    out["failures"] = failures
    _emit(out, args.output, f"spectrum_d{args.degree}.json")
    return 0 if not failures else 1


def cmd_evolve(args):
    failures = []
    eta0 = evolution.load_initial_field(args.init)
    u0, u1 = math.log(args.t0), math.log(args.t1)
    result = evolution.evolve_ode(eta0, u0, u1, args.steps)
    div_after = evolution.div_residual(result)
    if div_after > 1e-8:
        failures.append(_failure("maxwell", "evolve_ode", {"steps": args.steps},
                                 div_after, 1e-8, "divergence not conserved"))
    modes, _ = spectrum.eigen_decompose(eta0.degree)
    expansion = evolution.decompose_initial(eta0, modes)
    cross = None
    if expansion.residual <= 1e-8:
        exact = evolution.propagate(expansion, args.t1 / args.t0)

        def dist(field):
            diff = field - exact
            return float(np.sqrt(max(sphere_integral(diff.norm_sq_poly()), 0.0)))

        err = dist(result)
        err_fine = dist(evolution.evolve_ode(eta0, u0, u1, 2 * args.steps))
        ratio = err / err_fine if err_fine > 1e-14 else float("inf")
        cross = {"error": err, "error_double_steps": err_fine,
                 "step_doubling_ratio": ratio}
        if err_fine > 1e-14 and ratio < 8.0:
            failures.append(_failure(
                "maxwell", "evolve_ode", {"steps": args.steps}, ratio, 8.0,
                "step doubling does not show fourth-order convergence"))
    report = {
        "seed": args.seed,
        "t0": args.t0,
        "t1": args.t1,
        "steps": args.steps,
        "divergence_residual": div_after,
        "decomposition_residual": expansion.residual,
        "spectral_cross_check": cross,
        "final_field": evolution.dump_initial_field(result),
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }
    _emit(report, args.output, "evolve.json")
    return 0 if not failures else 1


def _verify_frames(args):
    failures = []
    pts = _sphere_samples(args.samples, args.seed)
    worst_structure = 0.0
    worst_orth = 0.0
    for p in pts:
        worst_structure = max(worst_structure, structure_residual(p),
                              structure_residual(p, frame="right"))
        for frame in (left_frame_at(p), right_frame_at(p)):
            gram = frame @ frame.T
            worst_orth = max(worst_orth, float(np.max(np.abs(gram - np.eye(3)))))
    if worst_structure > 1e-12:
        failures.append(_failure("frame_calculus", "structure_residual", {},
                                 worst_structure, 1e-12, "structure equations"))
    if worst_orth > 1e-12:
        failures.append(_failure("frame_calculus", "frames", {},
                                 worst_orth, 1e-12, "orthonormality"))
    rng = np.random.default_rng(args.seed + 1)
    worst_star = 0.0
    for _ in range(50):
        xi = rng.standard_normal(3)
        back = hodge_star_s3(hodge_star_s3(xi, 1), 2)
        worst_star = max(worst_star, float(np.max(np.abs(back - xi))))
    if worst_star > 1e-12:
        failures.append(_failure("frame_calculus", "hodge_star_s3", {},
                                 worst_star, 1e-12, "star involution"))
    return failures, {
        "max_structure_residual": worst_structure,
        "max_orthonormality_defect": worst_orth,
        "max_star_involution_defect": worst_star,
        "samples": args.samples,
    }


def _verify_hodge(args):
    failures = []
    rep = spectrum.hodge_laplacian_check(args.degree)
    if rep["mu_min"] < 4 - 1e-8:
        failures.append(_failure("spectral", "hodge_laplacian_check",
                                 {"degree": args.degree}, rep["mu_min"],
                                 4 - 1e-8, "Hodge Laplacian below 4"))
    if rep["max_square_pairing_deviation"] > 1e-7:
        failures.append(_failure("spectral", "hodge_laplacian_check",
                                 {"degree": args.degree},
                                 rep["max_square_pairing_deviation"], 1e-7,
                                 "mu values are not the squared *d eigenvalues"))
    defect = spectrum.divergence_free_subspace(args.degree).projector_defect()
    if defect > 1e-10:
        failures.append(_failure("spectral", "divergence_free_subspace",
                                 {"degree": args.degree}, defect, 1e-10,
                                 "subspace not *d-invariant"))
    rep["subspace_invariance_defect"] = defect
    return failures, rep


def _verify_kato(args):
    failures = []
    forms = {
        "ak_mixed": ale.ak_form(ale.AKFormParams(1.0, 1.0, 0.2)),
        "pure_minus_two": selfdual.SelfDualForm(
            [(1.0, -2, right_invariant_coframe(1))]),
        "kahler_plus_decaying": selfdual.SelfDualForm(
            [(0.5, 2, left_invariant_coframe(1)),
             (1.5, -2, right_invariant_coframe(2))]),
    }
    worst = {}
    pts = _annulus_samples(args.samples, args.seed)
    for name, sdf in forms.items():
        ratios = []
        for x in pts:
            try:
                r = selfdual.kato_ratio(sdf, x, KATO_DEFAULT_H)
            except ValueError:
                continue
            if r is not None:
                ratios.append(r)
        worst[name] = max(ratios) if ratios else None
        if ratios and max(ratios) > KATO_BOUND:
            failures.append(_failure("selfdual_r4", "kato_ratio", {"form": name},
                                     max(ratios), KATO_BOUND,
                                     "sharpened Kato bound violated"))
    return failures, {"max_ratio_per_form": worst, "bound": KATO_BOUND,
                      "samples": args.samples, "h": KATO_DEFAULT_H}


def _verify_orthogonality(args):
    failures = []
    modes, _ = spectrum.eigen_decompose(args.degree)
    worst_shell = 0.0
    n_pairs = 0
    for i, m1 in enumerate(modes):
        for m2 in modes[i + 1:]:
            if m1.lam_int == m2.lam_int:
                continue
            n_pairs += 1
            for t in (0.5, 1.0, 2.0):
                worst_shell = max(worst_shell,
                                  abs(selfdual.l2_shell_orthogonality(m1, m2, t)))
    if worst_shell > 1e-10:
        failures.append(_failure("selfdual_r4", "l2_shell_orthogonality",
                                 {"degree": args.degree}, worst_shell, 1e-10,
                                 "distinct eigenvalue shells not orthogonal"))
    return failures, {"max_shell_pairing": worst_shell,
                      "distinct_pairs_checked": n_pairs, "degree": args.degree}


def _verify_elliptic(args):
    failures = []
    sdf = ale.ak_form(ale.AKFormParams(1.0, 1.0, 0.2))
    h = 1e-4
    pts = _annulus_samples(args.samples, args.seed, lo=0.5, hi=3.0)
    worst = 0.0
    checked = 0
    for x in pts:
        try:
            coarse = regularity.sqrt_elliptic_check(sdf, x, 2 * h)
        except ValueError:
            continue
        checked += 1
        tol = 2.0 * max(abs(coarse) / (2 * h) ** 2, 1.0) * h ** 2 + 5e-6
        val = regularity.sqrt_elliptic_check(sdf, x, h)
        worst = min(worst, val + tol)
        if val < -tol:
            failures.append(_failure("regularity", "sqrt_elliptic_check",
                                     {"x": list(map(float, x))}, val, -tol,
                                     "sqrt-norm subharmonicity violated"))
    return failures, {"points_checked": checked, "h": h,
                      "worst_margin": worst}


VERIFY_SUITES = {
    "frames": _verify_frames,
    "hodge": _verify_hodge,
    "kato": _verify_kato,
    "orthogonality": _verify_orthogonality,
    "elliptic": _verify_elliptic,
}


def cmd_verify(args):
    failures, details = VERIFY_SUITES[args.suite](args)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "details": details,
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }
    _emit(report, args.output, f"verify_{args.suite}.json")
    return 0 if not failures else 1


def cmd_ale_report(args):
    failures = []
    params = ale.AKFormParams(args.alpha, args.beta, args.epsilon)
    model = params.model
    rng = np.random.default_rng(args.seed)

    # curvature block: closed-form identities over the full window, the
    # finite-difference oracle where its stencil resolves the metric, with
    # the O(h^2) contract certified by step-doubling at the worst point
    dirs = rng.standard_normal((args.ricci_samples, 4))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rhos_id = rng.uniform(-5.0, 5.0, args.ricci_samples)
    worst_norm = 0.0
    worst_scalar = 0.0
    for u, rho in zip(dirs, rhos_id):
        x = float(model.t_of_rho(rho)) * u
        expected = 192 * params.epsilon ** 4 / (rho ** 2 + 4 * params.epsilon ** 2) ** 4
        worst_norm = max(worst_norm,
                         abs(model.ricci_norm_sq(x) - expected) / expected)
        worst_scalar = max(worst_scalar, abs(model.scalar_curvature(x)))
    rhos_fd = rng.uniform(-1.0, 5.0, args.ricci_samples)
    worst_fd = 0.0
    worst_x = None
    for u, rho in zip(dirs, rhos_fd):
        x = float(model.t_of_rho(rho)) * u
        closed = model.ricci_closed_form(x)
        fd = model.ricci_numeric(x, args.h)
        rel = float(np.max(np.abs(closed - fd)) / np.max(np.abs(closed)))
        if rel > worst_fd:
            worst_fd, worst_x = rel, x
    order = None
    if worst_fd > 1e-9:
        closed = model.ricci_closed_form(worst_x)
        coarse = float(np.max(np.abs(closed - model.ricci_numeric(worst_x, 2 * args.h)))
                       / np.max(np.abs(closed)))
        order = float(np.log2(coarse / worst_fd))
        if not 1.5 <= order <= 2.6:
            failures.append(_failure("ale_models", "ricci_numeric",
                                     {"h": args.h}, order, [1.5, 2.6],
                                     "oracle not converging at second order"))
    if worst_fd > 1e-2:
        failures.append(_failure("ale_models", "ricci_numeric", {"h": args.h},
                                 worst_fd, 1e-2, "oracle disagrees"))
    if worst_norm > 1e-10:
        failures.append(_failure("ale_models", "ricci_closed_form", {},
                                 worst_norm, 1e-10, "|Ric|^2 identity violated"))
    if worst_scalar > 1e-10:
        failures.append(_failure("ale_models", "ricci_closed_form", {},
                                 worst_scalar, 1e-10, "scalar curvature nonzero"))

    # asymptotics block
    rho_max = args.rho_max
    asym = {}
    for end, coeff in (("plus_end", args.alpha), ("minus_end", args.beta)):
        sign = 1.0 if end == "plus_end" else -1.0
        t_end = float(model.t_of_rho(sign * rho_max))
        norm_sq = float(ale.ak_norm_sq_closed_form(params, t_end, 0.0))
        deviation = abs(norm_sq - coeff ** 2)
        bound = 10.0 / rho_max ** 2
        asym[end] = {"norm_sq": norm_sq, "limit": coeff ** 2,
                     "deviation": deviation, "bound": bound}
        if deviation > bound:
            failures.append(_failure("ale_models", "ak_form_eval",
                                     {"end": end, "rho": sign * rho_max},
                                     deviation, bound,
                                     "end asymptotics out of envelope"))

    # energy block
    A = max(20.0, 10.0 / params.epsilon if params.epsilon else 20.0)
    energy = {}
    if args.alpha == 0.0 and args.beta == 0.0:
        energy = {"boundary": 0.0, "volume": 0.0, "relative_agreement": 0.0}
    else:
        boundary = ale.grad_energy_boundary(params, A)
        volume = ale.grad_energy_volume(params, A)
        rel = abs(volume - boundary) / max(abs(boundary), 1e-300)
        refs = ale.energy_reference_values(params)
        energy = {
            "cutoff": A,
            "boundary": boundary,
            "volume": volume,
            "relative_agreement": rel,
            "computed_constant": refs["computed_expected"],
            "reference_area_form": refs["reference_area_form"],
            "reference_prose": refs["reference_prose"],
            "matches_area_form": bool(np.isclose(boundary,
                                                 refs["reference_area_form"],
                                                 rtol=0.05)),
            "matches_prose": bool(np.isclose(boundary, refs["reference_prose"],
                                             rtol=0.05)),
        }
        if rel > 0.01:
            failures.append(_failure("ale_models", "grad_energy_boundary",
                                     {"A": A}, rel, 0.01,
                                     "boundary and volume energies disagree"))

    # decay block
    decay = {}
    for end, coeff in (("plus", args.alpha), ("minus", args.beta)):
        profile = ale.decay_profile(params, end, rho_min=10.0, rho_max=rho_max)
        if any(v <= 0 for _, v in profile):
            decay[end] = {"classification": "Zero", "exponent": None}
            continue
        rep = ale.decay_classify(profile)
        decay[end] = rep.to_json()
        expected = (ale.ASYMPTOTICALLY_KAHLER if coeff != 0.0 else ale.FAST_DECAY)
        if rep.classification != expected:
            failures.append(_failure("ale_models", "decay_classify",
                                     {"end": end}, rep.classification, expected,
                                     "decay classification off the dichotomy"))

    report = {
        "seed": args.seed,
        "epsilon": args.epsilon,
        "alpha": args.alpha,
        "beta": args.beta,
        "ricci_check": {"max_fd_relative_error": worst_fd,
                        "fd_convergence_order": order,
                        "fd_meets_1e-4": bool(worst_fd <= 1e-4),
                        "max_norm_identity_error": worst_norm,
                        "max_scalar_curvature": worst_scalar,
                        "h": args.h, "samples": args.ricci_samples},
        "asymptotics": asym,
        "energy": energy,
        "decay": decay,
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }
    _emit(report, args.output, "ale_report.json")
    if args.output:
        import os

        rows = ["rho,norm_sq,ric_sq"]
        for rho in np.linspace(-args.rho_max, args.rho_max, 201):
            if abs(rho) < 1e-9:
                rho = 0.0
            t = float(model.t_of_rho(rho)) if params.epsilon else None
            nsq = float(ale.ak_norm_sq_closed_form(params, t, 0.0))
            rsq = 192 * params.epsilon ** 4 / (rho ** 2 + 4 * params.epsilon ** 2) ** 4
            rows.append(f"{rho:.12e},{nsq:.12e},{rsq:.12e}")
        with open(os.path.join(args.output, "ale_profile.csv"), "w") as fh:
            fh.write("\n".join(rows) + "\n")
    return 0 if not failures else 1


def cmd_moser(args):
    failures = []
    cs = np.geomspace(args.c_min, args.c_max, args.points)
    csv_text = regularity.moser_sweep_csv(cs, path=None)
    small = regularity.moser_product(1e-6)
    if not (1.0 <= small.ratio <= 1.0 + 1e-4):
        failures.append(_failure("regularity", "moser_product", {"c": 1e-6},
                                 small.ratio, 1 + 1e-4,
                                 "small-c ratio not tending to one"))
    big = regularity.moser_product(1.0, N=60)
    report = {
        "seed": args.seed,
        "c_min": args.c_min,
        "c_max": args.c_max,
        "points": args.points,
        "ratio_at_1e-6": small.ratio,
        "ratio_at_1": big.ratio,
        "printed_bound_holds_at_1": big.ratio <= 1.0,
        "sweep_csv": csv_text.splitlines(),
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }
    _emit(report, args.output, "moser.json")
    if args.output:
        import os

        with open(os.path.join(args.output, "moser_sweep.csv"), "w") as fh:
            fh.write(csv_text)
    return 0 if not failures else 1


def cmd_decay(args):
    failures = []
    params = ale.AKFormParams(args.alpha, args.beta, args.epsilon)
    profile = ale.decay_profile(params, args.end, rho_min=10.0,
                                rho_max=args.rho_max)
    rep = ale.decay_classify(profile)
    coeff = args.alpha if args.end == "plus" else args.beta
    expected = ale.ASYMPTOTICALLY_KAHLER if coeff != 0.0 else ale.FAST_DECAY
    if rep.classification != expected:
        failures.append(_failure("ale_models", "decay_classify",
                                 {"end": args.end}, rep.classification,
                                 expected, "unexpected classification"))
    report = {
        "seed": args.seed,
        "epsilon": args.epsilon,
        "alpha": args.alpha,
        "beta": args.beta,
        "end": args.end,
        "decay": rep.to_json(),
        "profile_head": [[r, v] for r, v in profile[:5]],
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }
    _emit(report, args.output, "decay.json")
    return 0 if not failures else 1


# ------------------------------------------------------------- plumbing

def _build_parser():
    # the common flags are accepted both before and after the subcommand;
    # SUPPRESS keeps an unset subparser flag from clobbering the top-level one
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file with defaults")
    common.add_argument("--output", default=argparse.SUPPRESS,
                        help="directory for report artifacts")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    top = argparse.ArgumentParser(
        prog="sdforms", parents=[common],
        description="verification pipelines for the sphere spectral calculus")
    sub = top.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("spectrum", help="eigenvalue report of *d")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--exact", action="store_true",
                   help="exact rational kernel ranks instead of a float solver")
    p.set_defaults(func=cmd_spectrum)

    p = add_parser("evolve", help="evolve an initial field")
    p.add_argument("--init", required=True, help="JSON initial-data file")
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=cmd_evolve)

    p = add_parser("verify", help="named check suites")
    p.add_argument("suite", choices=sorted(VERIFY_SUITES))
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=cmd_verify)

    p = add_parser("ale-report", help="2-ended model report")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--rho-max", type=float, default=1000.0)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--ricci-samples", type=int, default=100)
    p.set_defaults(func=cmd_ale_report)

    p = add_parser("moser", help="iteration product sweep")
    p.add_argument("--c-min", type=float, default=1e-8)
    p.add_argument("--c-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=33)
    p.set_defaults(func=cmd_moser)

    p = add_parser("decay", help="decay classification of one end")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--end", choices=["plus", "minus"], required=True)
    p.add_argument("--rho-max", type=float, default=1000.0)
    p.set_defaults(func=cmd_decay)
    return top


def _apply_config(args, parser, argv):
    if not args.config:
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    if cfg.get("schema_version") != CONFIG_SCHEMA_VERSION:
        parser.error(f"unsupported config schema_version {cfg.get('schema_version')!r}")
    section = cfg.get(args.command, {})
    explicit = {a.lstrip("-").replace("-", "_").split("=")[0]
                for a in argv if a.startswith("--")}
    for key, value in section.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr not in explicit:
            setattr(args, attr, value)
    return args


def dispatch(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    for attr, default in (("config", None), ("output", None),
                          ("seed", DEFAULT_SEED)):
        if not hasattr(args, attr):
            setattr(args, attr, default)
    args = _apply_config(args, parser, argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"status": "error", "message": str(exc)}))
        return 2


def main(argv=None):
    return sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
