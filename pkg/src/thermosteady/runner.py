"""Execute scenarios and collect their tabular outputs and summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import criteria, entropy, gas, hierarchy, kinetics, spectral
from .config import Scenario, Table, loads_scenario, parse_quantity
from .constants import ELECTRONVOLT, PLANCK
from .errors import ValidationError
from .spectral import VACUUM, EnergyScale

__all__ = [
    "ResultTable",
    "RunResult",
    "Overrides",
    "run_scenario",
    "shipped_scenarios",
    "find_shipped",
]


@dataclass
class ResultTable:
    name: str
    columns: List[str]
    rows: List[Sequence] = field(default_factory=list)


@dataclass
class RunResult:
    scenario: Scenario
    tables: List[ResultTable]
    summary: List[str]
    # structured values for programmatic checks; not written to disk
    data: Dict[str, object] = field(default_factory=dict)

    def table(self, name: str) -> ResultTable:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)


@dataclass(frozen=True)
class Overrides:
    seed: Optional[int] = None
    tolerances: Dict[str, float] = field(default_factory=dict)

    KNOWN = ("spectral", "balance", "population", "ks-alpha", "margin")

    def __post_init__(self):
        unknown = set(self.tolerances) - set(self.KNOWN)
        if unknown:
            raise ValidationError(
                f"unknown tolerance override(s) {sorted(unknown)}; known: {', '.join(self.KNOWN)}"
            )


def _environment(value, where: str):
    if isinstance(value, str) and value.strip().lower() == "vacuum":
        return VACUUM
    return parse_quantity(value, "temperature", where)


def _level_system(p: Table, populations=None) -> kinetics.LevelSystem:
    levels = p.raw("levels")
    transitions = p.raw("transitions", [])
    try:
        pairs = [(float(e), int(g)) for e, g in levels]
        triples = [(int(u), int(l), float(a)) for u, l, a in transitions]
    except (TypeError, ValueError):
        raise ValidationError(
            f"{p.where}: levels must be [energy_eV, degeneracy] pairs and "
            "transitions [upper, lower, A] triples"
        ) from None
    return kinetics.LevelSystem.from_ev(pairs, triples, populations)


def _planck_bath(ec: EnergyScale, system: kinetics.LevelSystem) -> spectral.SpectralField:
    lo, hi = 1e-4 * ec.joules / PLANCK, 60.0 * ec.joules / PLANCK
    freqs = [system.transition_frequency(t) for t in system.transitions]
    if freqs:
        lo, hi = min(lo, 0.5 * min(freqs)), max(hi, 2.0 * max(freqs))
    return spectral.ideal_planck_field(ec, np.geomspace(lo, hi, 2001))


# --------------------------------------------------------------------------
# spectral-report


def _run_spectral(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    temps = p.quantities("temperatures", "temperature", ["300 K"])
    orders = p.raw("orders", [2, 3, 4, 5])
    p.finish()

    be = ResultTable("bose_einstein", ["order", "closed_form", "quadrature", "rel_diff"])
    for s in orders:
        closed = spectral.bose_einstein_integral(s, method="closed")
        quad = spectral.bose_einstein_integral_quad(s)
        be.rows.append([s, closed, quad, abs(quad / closed - 1.0)])

    scales = ResultTable(
        "planck_scales",
        ["temperature_K", "ec_J", "ec_eV", "mean_photon_energy_J", "mean_over_ec",
         "sampled_field_mean_over_ec", "wien_peak_J", "wien_over_ec", "blackbody_flux_W_m2"],
    )
    for t in temps:
        ec = EnergyScale.from_kelvin(t)
        sampled = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, 1e-4, 60.0, 20001))
        scales.rows.append([
            t, ec.joules, ec.ev, spectral.mean_photon_energy(ec),
            spectral.mean_photon_energy(ec) / ec.joules,
            sampled.mean_photon_energy() / ec.joules, spectral.wien_peak(ec),
            spectral.wien_peak(ec) / ec.joules, spectral.stefan_boltzmann_flux(t),
        ])

    ratio = spectral.mean_photon_energy(1.0)
    ratio_q = spectral.mean_photon_energy_quad(1.0)
    wien = spectral.wien_peak_ratio()
    summary = [
        f"mean photon energy <h nu>/E_c = {ratio:.6f}  (pi^4 / (30 zeta(3)))",
        f"quadrature moment ratio       = {ratio_q:.6f}  (rel diff {abs(ratio_q / ratio - 1):.1e})",
        f"Wien peak h nu_peak/E_c       = {wien:.6f}",
    ]
    summary += [
        f"blackbody flux at {t:g} K = {spectral.stefan_boltzmann_flux(t):.4g} W/m^2" for t in temps
    ]
    return RunResult(sc, [be, scales], summary, {"mean_ratio": ratio, "wien_ratio": wien})


# --------------------------------------------------------------------------
# kinetics-run


def _run_kinetics(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    system = _level_system(p)
    initial = p.raw("initial", "ground")
    if initial == "ground":
        pops = None
    elif initial == "top":
        pops = np.eye(system.n_levels)[-1]
    else:
        pops = [float(x) for x in initial]
    system = system.with_populations(pops)
    bath_raw = p.raw("bath", "vacuum")
    env = _environment(bath_raw, f"{p.where}.bath")
    duration = p.quantity("duration", "time")
    samples = p.integer("samples", 201)
    rtol = p.quantity("rtol", None, 1e-9)
    p.finish()

    if env is VACUUM:
        coupling = kinetics.BathCoupling()
        bath_ec = None
    else:
        bath_ec = EnergyScale.from_kelvin(env)
        coupling = kinetics.BathCoupling(_planck_bath(bath_ec, system))

    traj = kinetics.evolve(system, coupling, duration, n_samples=samples, rtol=rtol)
    k = system.n_levels
    tab = ResultTable(
        "trajectory",
        ["time_s"] + [f"n_{i}" for i in range(k)] + ["mean_energy_eV", "net_radiated_power_W"],
    )
    mean_e = traj.mean_energy()
    for t, pop, me in zip(traj.times, traj.populations, mean_e):
        power = kinetics.net_radiated_power(system, coupling, pop)
        tab.rows.append([t, *pop, me / ELECTRONVOLT, power])

    summary = [f"levels: {k}, transitions: {len(system.transitions)}, "
               f"bath: {'vacuum' if bath_ec is None else f'Planck at {bath_ec.kelvin:g} K'}"]
    drift = float(np.max(np.abs(traj.total_population() - 1.0)))
    summary.append(f"population conservation: max |sum n - 1| = {drift:.2e}")
    data = {"trajectory": traj, "coupling": coupling, "population_drift": drift}

    steady = kinetics.steady_state(system, coupling)
    ss = ResultTable("steady_state", ["level", "energy_eV", "degeneracy", "steady_state", "evolved_final"]
                     + ([] if bath_ec is None else ["boltzmann"]))
    boltz = None if bath_ec is None else kinetics.boltzmann_populations(
        system.energies, system.degeneracies, bath_ec)
    for i in range(k):
        row = [i, system.energies[i] / ELECTRONVOLT, int(system.degeneracies[i]), steady[i],
               traj.populations[-1, i]]
        if boltz is not None:
            row.append(boltz[i])
        ss.rows.append(row)
    data["steady_state"] = steady
    summary.append(
        f"steady state vs final evolved populations: max diff "
        f"{np.max(np.abs(steady - traj.populations[-1])):.2e}"
    )
    if boltz is not None:
        data["boltzmann"] = boltz
        summary.append(f"steady state vs Boltzmann at bath E_c: max diff {np.max(np.abs(steady - boltz)):.2e}")
        summary.append(
            f"evolved vs Boltzmann at bath E_c: max diff {np.max(np.abs(traj.populations[-1] - boltz)):.2e}"
        )
    else:
        decreasing = bool(np.all(np.diff(mean_e) < 0.0))
        summary.append(f"mean energy strictly decreasing (uncompensated cooling): {'yes' if decreasing else 'no'}")
        data["strictly_decreasing"] = decreasing
    summary.append(
        f"net radiated power: start {tab.rows[0][-1]:.4e} W, end {tab.rows[-1][-1]:.4e} W"
    )
    return RunResult(sc, [tab, ss], summary, data)


# --------------------------------------------------------------------------
# gas-run


def _distribution(t: Table):
    kind = t.string("kind")
    if kind == "maxwell":
        d = gas.Maxwell(t.quantity("ec", "energy"))
    elif kind == "bimodal":
        d = gas.Bimodal(t.quantity("v1"), t.quantity("v2"))
    elif kind == "monoenergetic":
        d = gas.Monoenergetic(t.quantity("v"))
    else:
        raise ValidationError(f"{t.where}.kind: unknown distribution {kind!r}")
    t.finish()
    return d


def _trend(ecs, channel) -> str:
    steps = np.diff(ecs)
    if math.isclose(channel.env_joules, ecs[0], rel_tol=1e-9):
        return f"held (max relative change {np.max(np.abs(ecs / ecs[0] - 1.0)):.1e})"
    if channel.env_joules < ecs[0]:
        return "monotone decreasing" if np.all(steps < 0.0) else "NOT monotone"
    return "monotone increasing" if np.all(steps > 0.0) else "NOT monotone"


def _run_gas(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    seed = sc.seed if ov.seed is None else ov.seed
    n = p.integer("n")
    mass = p.quantity("mass")
    cross = p.quantity("cross_section", None, 4.0e-19)
    density = p.quantity("number_density", None, 2.5e25)
    dt = p.quantity("dt", "time")
    h_bins = p.integer("h_bins", 40)
    alpha = ov.tolerances.get("ks-alpha", p.quantity("ks_alpha", None, gas.KS_ALPHA))
    dist = _distribution(p.table("initial"))
    phases = p.tables("phases")
    p.finish()

    state = gas.init_gas(n, mass, dist, seed, cross, density)
    rng = gas.make_rng(seed, 1)
    tables, summary, data = [], [f"N = {n}, seed = {seed}, dt = {dt:.4g} s"], {}
    cols = ["time_s", "fitted_ec_J", "fitted_T_K", "ks_statistic", "ks_pvalue", "h_value",
            "total_energy_J", "n_collisions"]
    for ph in phases:
        name = ph.string("name")
        steps = ph.integer("steps")
        every = ph.integer("record_every", 10)
        collide = ph.boolean("collisions", True)
        rad = ph.table("radiative", None)
        ph.finish()
        if rad is not None:
            kappa = rad.quantity("kappa")
            env_raw = rad.raw("environment", "vacuum")
            rad.finish()
            if isinstance(env_raw, str) and env_raw.strip().lower() == "matched":
                env = gas.fit_ec(state).ec.joules
            else:
                env_k = _environment(env_raw, f"{rad.where}.environment")
                env = VACUUM if env_k is VACUUM else EnergyScale.from_kelvin(env_k).joules
            state = replace(state, radiative=gas.GrayBodyChannel(kappa, env))
        else:
            state = replace(state, radiative=None)
        e0 = state.kinetic_energy()
        p0 = state.momentum()
        state, recs = gas.run_gas(state, dt, steps, rng, every, collisions=collide, h_bins=h_bins)
        tab = ResultTable(name, cols)
        for r in recs:
            tab.rows.append([r.time, r.fitted_ec, EnergyScale(r.fitted_ec).kelvin, r.ks_statistic,
                             r.ks_pvalue, r.h_value, r.total_energy, r.n_collisions])
        tables.append(tab)
        ecs = np.array([r.fitted_ec for r in recs])
        passes = [r.ks_pvalue >= alpha for r in recs]
        channel = state.radiative
        expected = e0 if channel is None else gas.relaxed_energy(e0, n, channel, steps * dt)
        e_drift = abs(state.kinetic_energy() / expected - 1.0)
        p_drift = float(np.max(np.abs(state.momentum() - p0))) / state.momentum_scale()
        summary.append(
            f"[{name}] E_c {EnergyScale(ecs[0]).kelvin:.4g} K -> {EnergyScale(ecs[-1]).kelvin:.4g} K; "
            f"KS pass (alpha={alpha:g}) at final snapshot: {'yes' if passes[-1] else 'no'} "
            f"(p={recs[-1].ks_pvalue:.3g}); passes at {sum(passes)}/{len(passes)} snapshots"
        )
        label = "energy drift" if channel is None else "energy vs closed-form relaxation"
        line = f"[{name}] {label} {e_drift:.2e}, momentum drift {p_drift:.2e}"
        if channel is not None:
            line += f", E_c {_trend(ecs, channel)}"
        summary.append(line)
        data[name] = {"records": recs, "energy_drift": e_drift, "momentum_drift": p_drift,
                      "ks_pass": passes, "state": state}
    return RunResult(sc, tables, summary, data)


# --------------------------------------------------------------------------
# hierarchy-run


def _link(t: Table):
    kind = t.string("type")
    if kind == "conductive":
        lk = hierarchy.ConductiveLink(t.quantity("conductance"))
    elif kind == "radiative":
        lk = hierarchy.RadiativeLink(t.quantity("area"), t.quantity("emissivity"))
    else:
        raise ValidationError(f"{t.where}.type: unknown link type {kind!r}")
    t.finish()
    return lk


def _surface(t: Optional[Table]):
    if t is None:
        return None
    s = hierarchy.Surface(t.quantity("area"), t.quantity("emissivity"))
    t.finish()
    return s


def _run_hierarchy(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    nodes = []
    for t in p.tables("nodes"):
        nodes.append(hierarchy.Reservoir(
            t.string("name"), t.quantity("capacity"), t.quantity("temperature", "temperature"),
            t.quantity("generation", "power", 0.0), t.quantity("extraction", "power", 0.0),
            _surface(t.table("surface", None)),
        ))
        t.finish()
    links = [_link(t) for t in p.tables("links", [])]
    bt = p.table("boundary", None)
    if bt is None:
        boundary = hierarchy.Boundary()
    else:
        env = _environment(bt.raw("temperature", "vacuum"), f"{bt.where}.temperature")
        blink = bt.table("link", None)
        boundary = hierarchy.Boundary(env, None if blink is None else _link(blink))
        bt.finish()
    duration = p.quantity("duration", "time")
    samples = p.integer("samples", 201)
    rt = p.table("report", None)
    report_cfg = None
    if rt is not None:
        report_cfg = (
            rt.integer("inner_index", 0),
            rt.quantity("tau_exp", "time"),
            rt.quantity("tolerance", "temperature"),
            ov.tolerances.get("margin", rt.quantity("threshold", None, hierarchy.DEFAULT_MARGIN_THRESHOLD)),
        )
        rt.finish()
    p.finish()

    chain = hierarchy.ReservoirChain(nodes, links, boundary)
    run = hierarchy.simulate_chain(chain, duration, n_samples=samples)
    names = chain.names
    traj = ResultTable("temperatures", ["time_s"] + [f"T_{n}_K" for n in names])
    flows = ResultTable(
        "flows",
        ["time_s"] + [f"link_{names[i]}_to_{names[i + 1]}_W" for i in range(len(links))]
        + [f"boundary_{n}_W" for n in names],
    )
    for k, t in enumerate(run.times):
        traj.rows.append([t, *run.temperatures[k]])
        flows.rows.append([t, *run.link_flows[k], *run.boundary_flows[k]])
    tables = [traj, flows]
    closure = run.energy_residual()
    node_res = float(np.max(np.abs(run.node_energy_residuals())))
    summary = [
        f"{chain.n} reservoirs over {duration:.4g} s",
        f"global energy closure residual (relative) = {closure:.2e}",
        f"per-node energy closure residual (max relative) = {node_res:.2e}",
        f"second-law sign of every link flow: {'ok' if run.second_law_ok() else 'VIOLATED'}",
    ]
    for i, n in enumerate(names):
        summary.append(f"  {n}: {run.temperatures[0, i]:.6g} K -> {run.temperatures[-1, i]:.6g} K")
    data = {"run": run, "closure": closure, "second_law_ok": run.second_law_ok()}
    if report_cfg is not None:
        inner, tau, tol, threshold = report_cfg
        rows = hierarchy.effective_reservoir_report(chain, inner, tau, tol, run=run, threshold=threshold)
        rep = ResultTable("validity", ["level", "capacity_J_per_K", "q_dot_peak_W", "bound_s", "margin", "holds"])
        summary.append(f"infinite-reservoir validity (tau_exp = {tau:g} s, tolerance = {tol:g} K, "
                       f"threshold = {threshold:g}x):")
        for r in rows:
            rep.rows.append([r.name, r.capacity, r.q_dot_peak, r.bound_seconds, r.margin, int(r.holds)])
            summary.append(f"  {r.name}: margin {r.margin:.4g} -> {'holds' if r.holds else 'fails'}")
        tables.append(rep)
        data["report"] = rows
    return RunResult(sc, tables, summary, data)


# --------------------------------------------------------------------------
# entropy-demo


def _run_entropy(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    ec = p.quantity("ec", "energy")
    sweep = p.integer("sweep", 0)
    events = []
    for t in p.tables("events"):
        name = t.string("name")
        e_in = t.quantity("input", "energy")
        if "outputs" in t:
            outs = t.quantities("outputs", "energy")
        else:
            n = t.integer("split")
            outs = [e_in / n] * n
        t.finish()
        events.append((name, entropy.MultiplicationEvent(e_in, tuple(outs), ec)))
    p.finish()

    tab = ResultTable("events", ["event", "input_eV", "n_out", "conservation_error",
                                 "forward_delta", "reverse_delta", "forward_si_J_per_K"])
    summary = [f"reference E_c = {ec / ELECTRONVOLT:g} eV"]
    reports = {}
    for name, ev in events:
        if ev.n_out >= 2:
            rep = entropy.arrow_check(ev)
            fwd, rev = rep.forward, rep.reverse_delta
        else:
            fwd, rev = entropy.event_entropy_delta(ev), -0.0
        reports[name] = (fwd, rev)
        tab.rows.append([name, ev.input_energy / ELECTRONVOLT, ev.n_out, ev.conservation_error(),
                         fwd.dimensionless, rev, fwd.si])
        summary.append(
            f"{name}: {ev.input_energy / ELECTRONVOLT:g} eV -> {ev.n_out} photons: "
            f"delta S/k_B = {fwd.dimensionless:.6f} (reverse {rev:+.6f})"
        )
    tables = [tab]
    if sweep and events:
        e0 = events[0][1].input_energy
        sw = ResultTable("photon_count_sweep", ["n_photons", "delta_S_over_kB"])
        for n in range(1, sweep + 1):
            sw.rows.append([n, entropy.multiplication_entropy(e0, ec, n).dimensionless])
        tables.append(sw)
    return RunResult(sc, tables, summary, {"events": reports})


# --------------------------------------------------------------------------
# classify


def _spectrum(t: Optional[Table], claimed_k: float):
    if t is None:
        return None
    kind = t.string("kind")
    if kind == "planck":
        temp = t.quantity("temperature", "temperature", claimed_k)
        points = t.integer("points", 400)
        excess = t.quantity("excess", None, 0.0)
        t.finish()
        ec = EnergyScale.from_kelvin(temp)
        f = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, 0.05, 20.0, points))
        return f if excess == 0.0 else f.scaled(1.0 + excess)
    if kind == "tabulated":
        f = spectral.SpectralField(t.quantities("frequencies"), t.quantities("occupation"))
        t.finish()
        return f
    raise ValidationError(f"{t.where}.kind: unknown spectrum kind {kind!r}")


def _run_classify(sc: Scenario, p: Table, ov: Overrides) -> RunResult:
    claimed = p.quantity("claimed_temperature", "temperature")
    n_dof = p.integer("n_dof")
    spectrum = _spectrum(p.table("spectrum", None), claimed)
    gen = p.quantity("generation", "power", None)
    rad = p.quantity("radiated", "power", None)
    source = p.string("source", "") or None
    bt = p.table("bath", None)
    bath = None
    if bt is not None:
        bath = criteria.Bath(EnergyScale.from_kelvin(bt.quantity("temperature", "temperature")),
                             bt.boolean("exchange", True))
        bt.finish()
    pt = p.table("populations", None)
    levels = None
    if pt is not None:
        simulate = pt.boolean("simulate", False)
        fractions = pt.raw("fractions", None)
        levels = _level_system(pt)
        pt.finish()
        if simulate:
            if bath is None:
                raise ValidationError(f"{pt.where}: simulate = true needs a [bath]")
            coupling = kinetics.BathCoupling(_planck_bath(bath.ec, levels))
            levels = levels.with_populations(kinetics.steady_state(levels, coupling))
        elif fractions is not None:
            levels = levels.with_populations([float(x) for x in fractions])
        else:
            raise ValidationError(f"{pt.where}: give fractions or simulate = true")
    p.finish()

    tol = criteria.Tolerances(
        spectral=ov.tolerances.get("spectral", 0.05),
        balance=ov.tolerances.get("balance", 0.05),
        population=ov.tolerances.get("population", 0.05),
    )
    desc = criteria.SystemDescription(
        EnergyScale.from_kelvin(claimed), n_dof, spectrum, gen, rad, bath, levels, source,
    )
    verdict = criteria.classify(desc, tol)
    tab = ResultTable("criteria", ["group", "criterion", "passed", "residual", "note"])
    for c in verdict.criteria:
        tab.rows.append([c.group, c.name, int(c.passed), c.residual, c.note])
    summary = [f"classification: {verdict.classification}"] + verdict.report().splitlines()[1:]
    summary.append("note: the verdict is relative to the described system boundary")
    return RunResult(sc, [tab], summary, {"verdict": verdict})


_RUNNERS = {
    "spectral-report": _run_spectral,
    "kinetics-run": _run_kinetics,
    "gas-run": _run_gas,
    "hierarchy-run": _run_hierarchy,
    "entropy-demo": _run_entropy,
    "classify": _run_classify,
}


def run_scenario(sc: Scenario, overrides: Optional[Overrides] = None) -> RunResult:
    """Run a parsed scenario.  Unknown parameter keys raise ValidationError."""
    ov = overrides or Overrides()
    # parameter tables are consumed by the runner; run on a fresh copy so a
    # Scenario can be executed more than once
    params = Table(sc.params.data, sc.params.where)
    return _RUNNERS[sc.kind](sc, params, ov)


def shipped_scenarios() -> List[Scenario]:
    """All scenarios bundled with the package, sorted by file name."""
    root = resources.files("thermosteady") / "scenarios"
    out = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".toml"):
            out.append(loads_scenario(entry.read_text(encoding="utf-8"), entry))
    return out


def find_shipped(name: str) -> Optional[Scenario]:
    for sc in shipped_scenarios():
        if sc.name == name:
            return sc
    return None
