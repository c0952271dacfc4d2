"""Command-line entry point: ``horogauss <command> [options]``.

Every command prints one JSON report (or writes it to ``--output``). Exit
status is 0 on success, 1 when the run detects an invariant violation or a
numerical failure, and 2 on usage errors such as unknown selectors.
"""

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import catalog, embed_probe, horospherical, io, normal_flow, surface
from . import conformal_growth as cg
from .errors import HorogaussError, NewtonDivergence
from .pde import TAU_NEWTON

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)


# --- helpers -----------------------------------------------------------------

def _surface(selector):
    try:
        entry = catalog.resolve(selector)
    except (catalog.SelectorError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"{selector}: {exc}") from exc
    if entry.chart is None:
        raise UsageError(f"{selector} is a planar metric, not a surface")
    return entry


def _metric_entry(selector, grid):
    try:
        name, _ = catalog.parse_selector(selector)
    except catalog.SelectorError as exc:
        raise UsageError(str(exc)) from exc
    if name not in ("model", "round", "flat"):
        raise UsageError(f"{selector} is a surface, not a planar metric")
    try:
        return catalog.resolve(selector, grid=grid)
    except ValueError as exc:
        raise UsageError(f"{selector}: {exc}") from exc


def _param_grid(chart, n, extent):
    axes = []
    for i in range(chart.dim):
        lo, hi = chart.lower[i], chart.upper[i]
        if chart.periodic[i]:
            axes.append(np.linspace(lo, hi, n + 1)[:-1])
        elif np.isfinite(lo) and np.isfinite(hi):
            axes.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
        else:
            axes.append(np.linspace(-extent, extent, n))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, chart.dim)


def _summary(a):
    a = np.asarray(a, dtype=float)
    return {"min": float(np.nanmin(a)), "max": float(np.nanmax(a)), "median": float(np.nanmedian(a))}


def _kappa_summary(kappa):
    return [_summary(kappa[:, i]) for i in range(kappa.shape[1])]


# --- commands ----------------------------------------------------------------

def cmd_classify(a):
    entry = _surface(a.surface)
    P = _param_grid(entry.chart, a.grid, a.extent)
    j = surface.jet(entry.chart, P)
    pd = surface.principal(j, tol=a.tau_eig)
    flags = surface.classify_array(pd.curvatures, strict=a.strict, tol=a.tau_class)
    res = j.residuals()
    violations = [f"jet residual {k} = {v:.3g}" for k, v in res.items() if v > a.tau_jet]
    exp = entry.expected.get("kappa")
    if exp is not None:
        err = float(np.max(np.abs(pd.curvatures - np.sort(exp))))
        if err > a.tau_curv:
            violations.append(f"kappa differs from catalog value by {err:.3g}")
    report = {
        "command": "classify",
        "surface": entry.selector,
        "samples": len(P),
        "kappa": [float(np.median(pd.curvatures[:, i])) for i in range(entry.chart.dim)],
        "kappa_range": _kappa_summary(pd.curvatures),
        "flags": {k: bool(np.all(v)) for k, v in flags.items()},
        "flag_fraction": {k: float(np.mean(v)) for k, v in flags.items()},
        "strict": a.strict,
        "classification_tolerance": a.tau_class,
        "jet_residuals": res,
        "violations": violations,
    }
    return report, bool(violations)


def cmd_horo(a):
    entry = _surface(a.surface)
    chart = entry.chart
    P = _param_grid(chart, a.grid, a.extent)
    j = surface.jet(chart, P)
    pd = surface.principal(j)
    hd = horospherical.light_cone(j)
    kappa = pd.curvatures
    violations = []
    report = {"command": "horo", "surface": entry.selector, "samples": len(P),
              "rho": _summary(hd.rho), "kappa_range": _kappa_summary(kappa)}
    null = float(np.max(np.abs(np.einsum("ij,ij->i", hd.psi[:, 1:], hd.psi[:, 1:]) - hd.psi[:, 0] ** 2)
                        / hd.psi[:, 0] ** 2))
    report["psi_null_residual"] = null
    spread = float(np.max(np.linalg.norm(hd.gauss_point - hd.gauss_point.mean(axis=0), axis=1)))
    report["gauss_point_spread"] = spread
    if np.all(kappa > -1):
        ct = horospherical.schouten_tensor(pd, hd.g_h)
        report["p_eigenvalues"] = _kappa_summary(ct.eigenvalues)
        if chart.dim == 2:
            report["gauss_curvature"] = _summary(ct.gauss_curv)
        pts = P[:: max(1, len(P) // 4)][:4]
        mr = max(horospherical.metric_relation_residual(chart, p) for p in pts)
        report["metric_relation_residual"] = mr
        tol = a.tau_metric if chart.derivative_mode == "analytic" else 1e-3
        if mr > tol:
            violations.append(f"metric relation residual {mr:.3g} > {tol:g}")
        if chart.dim == 2 and spread > 1e-8:
            base = entry.expected.get("support_base")
            sf = (horospherical.support_on_patch(chart) if base is None
                  else horospherical.local_support(chart, base))
            Pt = horospherical.p_tensor_from_support(sf.rho, sf.patch)
            tr = horospherical.p_field_trace(Pt, sf.rho, sf.patch)
            k = sf.kappa
            K = horospherical.horo_sectional(k[..., 0], k[..., 1])
            terr = float(np.nanmax(np.abs(tr - K)))
            gres = float(np.nanmax(np.abs(horospherical.gauss_equation_residual(sf.rho, K, sf.patch))))
            report["support_patch"] = {"newton_residual": sf.newton_residual, "p_trace_error": terr,
                                       "gauss_equation_residual": gres}
            if terr > a.tau_curv or gres > a.tau_curv:
                violations.append("support-function curvature check failed")
    else:
        report["note"] = "some kappa <= -1: horospherical metric degenerate, tensors skipped"
    report["violations"] = violations
    return report, bool(violations)


def cmd_flow(a):
    entry = _surface(a.surface)
    chart = entry.chart
    P = _param_grid(chart, a.grid, a.extent)
    pd = surface.principal(surface.jet(chart, P))
    kappa = pd.curvatures
    violations = []
    try:
        state = normal_flow.flow_state(kappa, a.t)
    except HorogaussError as exc:
        return {"command": "flow", "surface": entry.selector, "t": a.t, "error": str(exc)}, True
    n = chart.dim
    iu, ju = np.triu_indices(n, 1)
    K0 = kappa[:, iu] * kappa[:, ju] - 1
    Kt = state.K_t[:, iu, ju]
    sign_ok = bool(np.all((np.sign(np.round(Kt, 12)) == np.sign(np.round(K0, 12))) | (a.t <= 0)))
    if not sign_ok:
        violations.append("sectional curvature changed sign under the flow")
    report = {
        "command": "flow",
        "surface": entry.selector,
        "t": a.t,
        "kappa": _kappa_summary(kappa),
        "kappa_t": _kappa_summary(state.kappa_t),
        "sectional": [_summary(K0[:, m]) for m in range(len(iu))],
        "sectional_t": [_summary(Kt[:, m]) for m in range(len(iu))],
        "consistency": state.consistency(),
    }
    if chart.dim == 2 and np.all(kappa > -1):
        fc = normal_flow.flowed_chart(chart, a.t)
        pts = P[:: max(1, len(P) // 4)][:4]
        num = surface.principal(surface.jet(fc, pts)).curvatures
        ref = surface.principal(surface.jet(chart, pts)).curvatures
        err = float(np.max(np.abs(num - normal_flow.flow_curvature(ref, a.t))))
        report["flowed_surface_kappa_error"] = err
        if err > a.tau_flow:
            violations.append(f"flowed surface curvature error {err:.3g}")
    report["violations"] = violations
    return report, bool(violations)


def _polar_grid(a):
    try:
        return cg.PolarGrid(a.rmin, a.rmax, a.nr, a.ntheta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_growth(a):
    if a.grid_csv:
        field_ = io.read_grid_csv(a.grid_csv)
        label = a.grid_csv
    else:
        if not a.metric:
            raise UsageError("growth needs --metric or --grid-csv")
        entry = _metric_entry(a.metric, _polar_grid(a))
        field_, label = entry.metric, entry.selector
    try:
        rep = cg.growth_exponent(field_, tol=a.tau_pde)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    violations = []
    if not rep.hypothesis_violated:
        if not rep.flux_monotone:
            violations.append("flux -r u_bar' not nondecreasing although K >= 0")
        if rep.m_flux < -a.tau_pde:
            violations.append("negative total curvature although K >= 0")
    if a.csv:
        io.write_grid_csv(field_, a.csv)
    report = {"command": "growth", "metric": label, "grid": field_.grid.spec(), **rep.to_dict(),
              "violations": violations}
    return report, bool(violations)


def cmd_pde(a):
    try:
        grid = cg.DiskGrid(a.radius, a.nr, a.ntheta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    entry = _metric_entry(a.metric, None)
    u_exact, K = entry.functions["u"], entry.functions["K"]
    X, Y = grid.xy()
    ue = u_exact(X, Y)
    R = np.hypot(X, Y)
    u0 = None if a.perturb is None else ue + a.perturb * (1 - (R / grid.radius) ** 2)
    try:
        sol = cg.solve_curvature_equation(K, u_exact, grid, tol=a.tau_newton, max_iter=a.max_iter, u0=u0)
    except NewtonDivergence as exc:
        return {"command": "pde", "metric": entry.selector, "error": str(exc),
                "residual": exc.residual, "iterations": exc.iterations}, True
    err = float(np.max(np.abs(sol.u - ue)))
    violations = []
    if err > a.tau_pde:
        violations.append(f"manufactured-solution error {err:.3g} > {a.tau_pde:g}")
    report = {"command": "pde", "metric": entry.selector, "grid": {"radius": grid.radius, "n_r": grid.n_r,
              "n_theta": grid.n_theta}, "initial_guess": "harmonic" if u0 is None else f"exact{a.perturb:+g}*bump",
              "iterations": sol.iterations, "residual": sol.residual, "max_error": err,
              "residual_history": sol.history, "violations": violations}
    return report, bool(violations)


def cmd_probe(a):
    entry = _surface(a.surface)
    rep, mesh = embed_probe.probe(entry.chart, a.resolution, a.extent, a.samples, a.theta_sep, a.tau_coinc)
    if a.off:
        mesh.write_off(a.off)
    violations = []
    exp = entry.expected
    if exp.get("embedded") and rep.intersecting_pairs:
        violations.append("transversal self-intersections on an embedded catalog surface")
    if exp.get("embedded") is False and not (rep.intersecting_pairs or rep.coincident_pairs):
        violations.append("expected a non-embedded surface but found no intersecting pairs")
    if "boundary_points" in exp and len(rep.boundary_clusters) != exp["boundary_points"]:
        violations.append(f"found {len(rep.boundary_clusters)} boundary clusters, expected {exp['boundary_points']}")
    d = rep.to_dict()
    report = {"command": "probe", "surface": entry.selector,
              "transversal_count": len(rep.intersecting_pairs), "coincident_count": len(rep.coincident_pairs),
              "injectivity_violation_count": len(rep.injectivity_violations), **d, "violations": violations}
    if not a.full:
        report["coincident_pairs"] = report["coincident_pairs"][:20]
        report["injectivity_violations"] = report["injectivity_violations"][:20]
    return report, bool(violations)


def cmd_catalog(a):
    return {"command": "catalog", "entries": catalog.listing()}, False


# --- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="horogauss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
        return sp

    def surf(sp, grid=16):
        sp.add_argument("--surface", required=True, help="catalog selector, e.g. equidistant:d=0.5,wraps=2")
        sp.add_argument("--grid", type=int, default=grid, help="samples per parameter axis")
        sp.add_argument("--extent", type=float, default=2.0, help="half-width for unbounded parameter axes")
        sp.add_argument("--tau-jet", type=float, default=surface.TAU_JET)
        sp.add_argument("--tau-eig", type=float, default=surface.TAU_EIG)
        sp.add_argument("--tau-curv", type=float, default=horospherical.TAU_CURV)

    sp = common(sub.add_parser("classify", help="principal curvatures and convexity flags over a grid"))
    surf(sp)
    sp.add_argument("--strict", action="store_true", help="also require kappa_i^2 >= 1 in the sectional test")
    sp.add_argument("--tau-class", type=float, default=surface.TAU_EIG,
                    help="slack for the non-strict convexity inequalities")
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("horo", help="light cone map, support function and horospherical curvature"))
    surf(sp, grid=8)
    sp.add_argument("--tau-metric", type=float, default=1e-6)
    sp.set_defaults(func=cmd_horo)

    sp = common(sub.add_parser("flow", help="curvature evolution under the normal flow"))
    surf(sp, grid=8)
    sp.add_argument("--t", type=float, required=True, help="flow time")
    sp.add_argument("--tau-flow", type=float, default=1e-5)
    sp.set_defaults(func=cmd_flow)

    sp = common(sub.add_parser("growth", help="growth exponent and total curvature of a planar metric"))
    sp.add_argument("--metric", help="metric selector: model:m=0.5, round, flat")
    sp.add_argument("--grid-csv", help="read the polar grid from CSV instead of a selector")
    sp.add_argument("--rmin", type=float, default=0.1)
    sp.add_argument("--rmax", type=float, default=1e3)
    sp.add_argument("--nr", type=int, default=256)
    sp.add_argument("--ntheta", type=int, default=256)
    sp.add_argument("--tau-pde", type=float, default=cg.TAU_PDE)
    sp.add_argument("--csv", help="also write the sampled grid as CSV")
    sp.set_defaults(func=cmd_growth)

    sp = common(sub.add_parser("pde", help="Newton solve of -Delta u = K e^{2u} against a manufactured solution"))
    sp.add_argument("--metric", required=True, help="model:m=..., round or flat")
    sp.add_argument("--radius", type=float, default=10.0)
    sp.add_argument("--nr", type=int, default=128)
    sp.add_argument("--ntheta", type=int, default=128)
    sp.add_argument("--perturb", type=float, default=-0.1,
                    help="start Newton from exact + PERTURB * (1 - r^2/R^2) (default -0.1; the"
                         " Dirichlet problem can have a second solution just above the exact one)")
    sp.add_argument("--harmonic-start", dest="perturb", action="store_const", const=None,
                    help="start from the harmonic extension of the boundary data instead")
    sp.add_argument("--tau-newton", type=float, default=TAU_NEWTON)
    sp.add_argument("--max-iter", type=int, default=50)
    sp.add_argument("--tau-pde", type=float, default=cg.TAU_PDE)
    sp.set_defaults(func=cmd_pde)

    sp = common(sub.add_parser("probe", help="mesh, self-intersection, Gauss injectivity and ideal boundary"))
    sp.add_argument("--surface", required=True)
    sp.add_argument("--resolution", type=int, default=32)
    sp.add_argument("--extent", type=float, default=3.0)
    sp.add_argument("--samples", type=int, default=64)
    sp.add_argument("--theta-sep", type=float, default=embed_probe.THETA_SEP)
    sp.add_argument("--tau-coinc", type=float, default=embed_probe.TAU_COINC)
    sp.add_argument("--off", help="write the mesh as an OFF file")
    sp.add_argument("--full", action="store_true", help="list every coincident pair and violation")
    sp.set_defaults(func=cmd_probe)

    sp = common(sub.add_parser("catalog", help="list catalog entries"))
    sp.set_defaults(func=cmd_catalog)
    return p


def run(config):
    """Execute a parsed configuration; returns (exit status, JSON text)."""
    args = argparse.Namespace(command=config.command, **config.options)
    try:
        report, violated = args.func(args)
    except UsageError as exc:
        return EXIT_USAGE, io.dumps({"command": config.command, "usage_error": str(exc)})
    except (HorogaussError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return EXIT_VIOLATION, io.dumps({"command": config.command, "error": type(exc).__name__,
                                         "message": str(exc)})
    return (EXIT_VIOLATION if violated else EXIT_OK), io.dumps(report)


def main(argv=None):
    args = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k != "command"}
    status, text = run(RunConfig(args.command, opts))
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_USAGE:
        sys.stderr.write("usage error; see --help\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
