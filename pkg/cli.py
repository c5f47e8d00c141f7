#!/usr/bin/env python3
"""
PolyKin CLI
===========
Closed-form kinetic-model quantities for polyatomic gases, their Monte Carlo
verification, and the reproduction of the published tables and plot data.

Usage: python cli.py prandtl-match --alpha 0.5
       python cli.py --gas N2 six-field --pi-ratio 0.2
       python cli.py --samples 1000000 --workers 4 verify
       python cli.py reproduce-tables --verbose

Exit codes: 0 success, 1 invalid input or dataset, 2 numerical failure
(oracle or table mismatch, root bracket, relaxation window), 3 I/O error.
"""

import argparse
import logging
import math
import os
import sys

import numpy as np

# Make relative imports work when run directly
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from data_sources.species     import SpeciesRegistry
from data_sources.viscosity   import ingest_csv
from kinetics.ensembles       import HydroState, collision_frequency, collision_frequency_hat
from kinetics.errors          import (
    DatasetError,
    DomainError,
    IntegrationFailure,
    KineticsError,
    NoSignChange,
    UnknownSpecies,
    WindowExit,
)
from kinetics.fourteen_moment import (
    alpha_vibrating,
    balance_fluxes_14,
    eucken_Pr,
    prandtl_number,
    production_14,
    solve_gamma_star,
    transport_coefficients,
)
from kinetics.mc_oracle       import DEFAULT_SAMPLES, oracle_collision_freq, verify_suite
from kinetics.microdynamics   import MicroState, SpeciesParams
from kinetics.six_field       import relax_homogeneous, six_field_report, tau_Pi_six
from reporting                import emit_plot_data, prandtl_gap_data, reproduce_tables, write_tables
from utils.fitting            import fit_power_law
from utils.output             import OUT_DIR, dumps, output_path, write_csv, write_json
from utils.rng                import DEFAULT_SEED, DEFAULT_WORKERS


log = logging.getLogger("polykin")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


# ── Helpers ───────────────────────────────────────────────────────────────────

class Context:
    """Parsed global flags plus the lazily loaded species registry."""

    def __init__(self, args):
        self.args = args
        self._registry = None

    @property
    def registry(self) -> SpeciesRegistry:
        if self._registry is None:
            self._registry = SpeciesRegistry(self.args.species_file)
        return self._registry

    def species(self, high_T: bool = False) -> SpeciesParams:
        a = self.args
        if a.gas:
            sp = self.registry.species_params(a.gas, high_T=high_T, dimensionless=a.dimensionless)
            if getattr(a, "alpha", None) is not None:
                sp = SpeciesParams(name=sp.name, m=sp.m, alpha=a.alpha, k=sp.k)
            return sp
        alpha = getattr(a, "alpha", None)
        return SpeciesParams.dimensionless(0.0 if alpha is None else alpha)

    def interaction(self):
        return self.registry.interaction(gamma=getattr(self.args, "gamma", None), K=getattr(self.args, "K", None))

    def hydro(self, species: SpeciesParams) -> HydroState:
        a = self.args
        T = a.T if a.T is not None else (1.0 if species.k == 1.0 else 300.0)
        base = HydroState(rho=a.rho, T=T)
        ratio = getattr(a, "pi_ratio", 0.0) or 0.0
        return base.with_fields(Pi=ratio * base.pressure(species))

    def out(self, name: str) -> str:
        return output_path(name, self.args.out)

    def emit(self, title: str, payload: dict) -> None:
        if self.args.json_output:
            print(dumps(payload), end="")
            return
        print(f"{'─' * 52}")
        print(f"  {title}")
        print(f"{'─' * 52}")
        for key, value in payload.items():
            if isinstance(value, float):
                print(f"  {key:25s}  {value:.6g}")
            else:
                print(f"  {key:25s}  {value}")
        print()


# ── Subcommands ───────────────────────────────────────────────────────────────

def cmd_collision_freq(ctx: Context) -> int:
    a = ctx.args
    sp = ctx.species()
    inter = ctx.interaction()
    if a.grid:
        path = emit_plot_data("collision-frequency", a.out, alphas=(sp.alpha,), gammas=(inter.gamma,),
                              c_max=a.c_max, I_max=a.I_max, points=a.points)
        ctx.emit("Collision frequency grid", {"path": path})
        return EXIT_OK

    hydro = ctx.hydro(sp)
    kT = sp.k * hydro.T
    state = MicroState([a.c_hat * math.sqrt(kT / sp.m), 0.0, 0.0], a.I_hat * kT)
    payload = {
        "alpha":  sp.alpha,
        "gamma":  inter.gamma,
        "c_hat":  a.c_hat,
        "I_hat":  a.I_hat,
        "nu_hat": collision_frequency_hat(a.c_hat, a.I_hat, sp.alpha, inter.gamma),
        "nu":     collision_frequency(state, hydro, sp, inter),
    }
    status = EXIT_OK
    if a.oracle:
        est = oracle_collision_freq(state, hydro, sp, inter, n=a.samples, seed=a.seed, workers=a.workers)
        passed = est.agrees_with(payload["nu"])
        payload.update(nu_mc=est.value, nu_mc_std_error=est.std_error, n_samples=est.n_samples, agrees=passed)
        status = EXIT_OK if passed else EXIT_NUMERICAL
    ctx.emit("Equilibrium collision frequency", payload)
    return status


def cmd_six_field(ctx: Context) -> int:
    sp = ctx.species()
    inter = ctx.interaction()
    report = six_field_report(ctx.hydro(sp), sp, inter)
    ctx.emit(f"Six-field closure  alpha={sp.alpha:g}  gamma={inter.gamma:g}", report.to_dict())
    return EXIT_OK


def cmd_six_field_relax(ctx: Context) -> int:
    a = ctx.args
    sp = ctx.species()
    inter = ctx.interaction()
    hydro = ctx.hydro(sp)
    decay = 3.0 * tau_Pi_six(hydro.at_equilibrium(), sp, inter)
    trace = relax_homogeneous(hydro, sp, inter, t_end=a.t_end * decay, n_out=a.points)
    path = write_csv(trace, ctx.out("six_field_relax.csv"))
    ctx.emit("Space-homogeneous relaxation of Pi", {
        "decay_time":      decay,
        "Pi_over_p_start": float(trace["Pi_over_p"].iloc[0]),
        "Pi_over_p_end":   float(trace["Pi_over_p"].iloc[-1]),
        "path":            path,
    })
    return EXIT_OK


def cmd_fourteen(ctx: Context) -> int:
    a = ctx.args
    sp = ctx.species()
    inter = ctx.interaction()
    hydro = ctx.hydro(sp)
    p = hydro.pressure(sp)
    state = hydro.with_fields(
        p_dev=np.array([[0.0, a.shear_ratio * p, 0.0], [a.shear_ratio * p, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        q=np.array([a.q, 0.0, 0.0]),
    )
    tc = transport_coefficients(hydro.at_equilibrium(), sp, inter)
    fluxes = balance_fluxes_14(state, sp)
    P, Q, coefficients = production_14(state, sp, inter)
    path = write_json({"state": state, "P": P, "Q": Q, "coefficients": coefficients, "fluxes": fluxes},
                      ctx.out("fourteen.json"))
    payload = tc.to_dict()
    payload["Pr_eucken"] = eucken_Pr(sp.alpha)
    payload["path"] = path
    ctx.emit(f"Fourteen-moment transport  alpha={sp.alpha:g}  gamma={inter.gamma:g}", payload)
    return EXIT_OK


def cmd_prandtl_match(ctx: Context) -> int:
    a = ctx.args
    if a.atoms is not None:
        alpha = alpha_vibrating(a.atoms)
    else:
        alpha = ctx.species(high_T=a.high_T).alpha
    g = solve_gamma_star(alpha)
    ctx.emit("Prandtl-matched gamma", {
        "alpha":      alpha,
        "gamma_star": g,
        "Pr":         prandtl_number(alpha, g),
        "Pr_eucken":  eucken_Pr(alpha),
    })
    return EXIT_OK


def cmd_delta_scan(ctx: Context) -> int:
    a = ctx.args
    alphas = [float(x) for x in a.alphas.split(",")]
    df = prandtl_gap_data(alphas, gamma_max=a.gamma_max, points=a.points)
    path = write_csv(df, ctx.out("delta_scan.csv"))
    ctx.emit("Delta(gamma, alpha) scan", {"rows": len(df), "max_abs_delta": float(df["delta"].abs().max()),
                                          "path": path})
    return EXIT_OK


def cmd_fit_viscosity(ctx: Context) -> int:
    a = ctx.args
    data = ingest_csv(a.path)
    if a.alpha is not None:
        alpha = a.alpha
    else:
        alpha = ctx.registry.resolve(a.gas or data.gas).params(high_T=a.high_T).alpha
        log.info("%s: alpha = %g from the species config", data.gas, alpha)
    fit = fit_power_law(data, alpha=alpha)
    path = write_json(fit.to_dict(), ctx.out(f"fit_{data.gas}.json"))
    payload = fit.to_dict()
    payload["path"] = path
    ctx.emit(f"Viscosity power law  {data.gas}", payload)
    return EXIT_OK


def cmd_reproduce_tables(ctx: Context) -> int:
    report = reproduce_tables(ctx.registry)
    paths = write_tables(report, ctx.args.out)
    failures = report.failures()
    ctx.emit("Reference tables", {"all_pass": report.all_pass, "failures": ", ".join(failures) or "none",
                                  "written": len(paths)})
    return EXIT_OK if report.all_pass else EXIT_NUMERICAL


def cmd_verify(ctx: Context) -> int:
    a = ctx.args
    checks = verify_suite(n=a.samples, seed=a.seed, workers=a.workers)
    passed = all(c.passed for c in checks)
    payload = {"n_samples": a.samples, "seed": a.seed, "workers": a.workers,
               "all_pass": passed, "checks": [c.to_dict() for c in checks]}
    path = write_json(payload, ctx.out("verify.json"))
    if a.json_output:
        print(dumps(payload), end="")
    else:
        for c in checks:
            mark = "ok  " if c.passed else "FAIL"
            print(f"  {mark} {c.name:50s} closed={c.closed_form:+.6e}  mc={c.mc_value:+.6e}"
                  f"  ({c.sigmas:.2f} sigma)")
        print(f"\n  {sum(c.passed for c in checks)}/{len(checks)} checks passed; report in {path}\n")
    return EXIT_OK if passed else EXIT_NUMERICAL


def cmd_plot_data(ctx: Context) -> int:
    a = ctx.args
    params = {}
    if a.data:
        params["data"] = ingest_csv(a.data)
    path = emit_plot_data(a.figure, a.out, **params)
    ctx.emit("Plot data", {"figure": a.figure, "path": path})
    return EXIT_OK


def cmd_species(ctx: Context) -> int:
    table = ctx.registry.table()
    if ctx.args.json_output:
        print(dumps({"species": table}), end="")
    else:
        print(table.to_string(index=False))
    return EXIT_OK


# ── Parser ────────────────────────────────────────────────────────────────────

def _add_gas_args(p):
    p.add_argument("--alpha", type=float, help="internal-degrees parameter (overrides the gas)")
    p.add_argument("--gamma", type=float, help="cross-section exponent (default: species config)")
    p.add_argument("--K", type=float, help="constant angular kernel (default: species config)")
    p.add_argument("--rho", type=float, default=1.0, help="density")
    p.add_argument("--T", type=float, help="temperature (default 300 K, or 1 dimensionless)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polykin", description="PolyKin — polyatomic kinetic model toolkit")
    parser.add_argument("--gas", help='species name or alias, e.g. "N2" or "nitrogen"')
    parser.add_argument("--species-file", help="species config (default: POLYKIN_SPECIES_FILE)")
    parser.add_argument("--dimensionless", action="store_true", help="m = k = 1, temperature in energy units")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    parser.add_argument("--out", default=OUT_DIR, help="output directory")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--json", action="store_true", dest="json_output",
                        help="Output JSON instead of formatted tables")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collision-freq", help="equilibrium collision frequency")
    _add_gas_args(p)
    p.add_argument("--c-hat", type=float, default=0.0)
    p.add_argument("--I-hat", type=float, default=0.0)
    p.add_argument("--oracle", action="store_true", help="also estimate by Monte Carlo")
    p.add_argument("--grid", action="store_true", help="write the (c_hat, I_hat) grid as CSV")
    p.add_argument("--c-max", type=float, default=5.0)
    p.add_argument("--I-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_collision_freq)

    p = sub.add_parser("six-field", help="six-field production, entropy and relaxation time")
    _add_gas_args(p)
    p.add_argument("--pi-ratio", type=float, default=0.0, help="Pi/p")
    p.set_defaults(func=cmd_six_field)

    p = sub.add_parser("six-field-relax", help="space-homogeneous relaxation of Pi")
    _add_gas_args(p)
    p.add_argument("--pi-ratio", type=float, required=True, help="initial Pi/p")
    p.add_argument("--t-end", type=float, default=5.0, help="end time in units of the linear decay time")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_six_field_relax)

    p = sub.add_parser("fourteen", help="fourteen-moment transport coefficients")
    _add_gas_args(p)
    p.add_argument("--pi-ratio", type=float, default=0.0, help="Pi/p")
    p.add_argument("--shear-ratio", type=float, default=0.0, help="p_<12>/p of the evaluated state")
    p.add_argument("--q", type=float, default=0.0, help="heat flux q_1 of the evaluated state")
    p.set_defaults(func=cmd_fourteen)

    p = sub.add_parser("prandtl-match", help="gamma* with model Pr equal to Eucken's")
    p.add_argument("--alpha", type=float)
    p.add_argument("--atoms", type=int, help="N-atom molecule with vibrations, alpha = (3N-5)/2")
    p.add_argument("--high-T", action="store_true", help="use the gas's alpha_high_T")
    p.set_defaults(func=cmd_prandtl_match)

    p = sub.add_parser("delta-scan", help="Delta(gamma, alpha) over a gamma grid")
    p.add_argument("--alphas", default="0,0.5,1,2,5")
    p.add_argument("--gamma-max", type=float, default=6.0)
    p.add_argument("--points", type=int, default=600)
    p.set_defaults(func=cmd_delta_scan)

    p = sub.add_parser("fit-viscosity", help="fit mu = A T^s to a T_K,mu_Pa_s file")
    p.add_argument("path")
    p.add_argument("--alpha", type=float, help="alpha for the Prandtl comparison (default: species config)")
    p.add_argument("--high-T", action="store_true", help="use the gas's alpha_high_T")
    p.set_defaults(func=cmd_fit_viscosity)

    p = sub.add_parser("reproduce-tables", help="reproduce the shipped reference tables")
    p.set_defaults(func=cmd_reproduce_tables)

    p = sub.add_parser("verify", help="closed forms against the Monte Carlo oracle")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot-data", help="write plot-ready CSV")
    p.add_argument("figure", help="collision-frequency | viscosity-fit | prandtl-gap (or fig1..fig3)")
    p.add_argument("--data", help="viscosity dataset for viscosity-fit")
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("species", help="list the species config")
    p.set_defaults(func=cmd_species)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="[%(name)s] %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING, force=True)
    ctx = Context(args)
    try:
        return args.func(ctx)
    except (DatasetError, DomainError, UnknownSpecies) as e:
        print(f"❌  {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NoSignChange, WindowExit, IntegrationFailure, KineticsError) as e:
        print(f"❌  {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"❌  {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(run())
