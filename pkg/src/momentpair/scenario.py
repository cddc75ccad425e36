"""Configuration, verification suites, simulation runners, and the CLI.

Config files are flat "key = value" text with '#' comments.  Every run
writes a manifest (config echo, RNG constants, tolerances, versions,
timings) next to its CSV outputs, so reported numbers are reproducible
from the manifest alone.  Exit codes: 0 success, 1 invariant violation,
2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, corpus, kinetic, momentdyn, momvlasov, phasealg, schouten
from .corpus import LCG_INC, LCG_MOD, LCG_MULT, Lcg64
from .gridcore import (
    GridFn,
    PhaseGrid,
    Scheme,
    SpatialGrid,
    ddq,
    moment_quad,
    quad_q,
    sample,
    to_csv,
)

SUBCOMMANDS = (
    "verify-algebra",
    "verify-dual",
    "run-moments",
    "run-vlasov",
    "run-momvlasov",
    "check-poisson-map",
    "check-intertwine",
    "dump",
)


class ConfigError(Exception):
    pass


@dataclasses.dataclass
class Config:
    L: float = 2.0 * np.pi
    Nq: int = 64
    Np: int = 128
    Pmax: float = 6.0
    dt: float = 0.05
    t_end: float = 1.0
    m: float = 1.0
    e: float = 1.0
    K: int = 4
    scheme: str = "Fourier"
    field_mode: str = "self_consistent"
    seed: int = 1
    order_cap: int = 8
    bernoulli_half_factor: bool = False

    def validate(self):
        positive = {"L": self.L, "Np": self.Np, "Nq": self.Nq, "Pmax": self.Pmax,
                    "dt": self.dt, "m": self.m}
        for name, value in positive.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.t_end < 0:
            raise ConfigError("t_end must be >= 0")
        if self.K < 2:
            raise ConfigError("K must be >= 2")
        if self.order_cap < 2:
            raise ConfigError("order_cap must be >= 2")
        try:
            scheme = Scheme.parse(self.scheme)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if scheme is Scheme.FOURIER:
            for name, n in (("Nq", self.Nq), ("Np", self.Np)):
                if n & (n - 1):
                    raise ConfigError(f"{name}={n} must be a power of two with the Fourier scheme")
        if self.field_mode not in ("self_consistent", "prescribed"):
            raise ConfigError(f"unknown field_mode {self.field_mode!r}")
        return self

    @property
    def scheme_enum(self) -> Scheme:
        return Scheme.parse(self.scheme)


def parse_config(text: str) -> Config:
    """Parse flat 'key = value' lines; '#' starts a comment."""
    fields = {f.name: f for f in dataclasses.fields(Config)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in fields:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        ftype = fields[key].type
        try:
            if ftype in ("bool", bool):
                if value.lower() in ("true", "1", "yes", "on"):
                    values[key] = True
                elif value.lower() in ("false", "0", "no", "off"):
                    values[key] = False
                else:
                    raise ValueError(f"bad boolean {value!r}")
            elif ftype in ("int", int):
                values[key] = int(value)
            elif ftype in ("float", float):
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return Config(**values).validate()


def load_config(path: str | None) -> Config:
    if path is None:
        return Config().validate()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# output plumbing


class RunContext:
    def __init__(self, outdir: Path, subcommand: str, config: Config, quiet: bool):
        self.outdir = outdir
        self.subcommand = subcommand
        self.config = config
        self.quiet = quiet
        self.t0 = time.perf_counter()
        self.manifest = {
            "subcommand": subcommand,
            "package_version": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "config": dataclasses.asdict(config),
            "lcg": {"mult": LCG_MULT, "inc": LCG_INC, "mod": str(LCG_MOD)},
            "tolerances": {},
            "notes": {},
            "results": {},
        }

    def say(self, msg: str):
        if not self.quiet:
            print(msg)

    def tolerance(self, name: str, value: float):
        self.manifest["tolerances"][name] = value

    def note(self, name: str, value):
        self.manifest["notes"][name] = value

    def result(self, name: str, value):
        self.manifest["results"][name] = value

    def write_text(self, name: str, text: str):
        self.outdir.mkdir(parents=True, exist_ok=True)
        (self.outdir / name).write_text(text)

    def finish(self) -> int:
        self.manifest["elapsed_seconds"] = round(time.perf_counter() - self.t0, 6)
        self.write_text("manifest.json", json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")
        return 0


def _csv(rows, header: str) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# exact algebra suite


def exact_algebra_suite(seed: int, instances: int = 100, order_cap: int = 10):
    """Run the exact identity corpus; returns (counts, failures)."""
    rng = Lcg64(seed)
    counts: dict[str, int] = {}
    failures: list[str] = []

    def check(name: str, ok: bool, detail: str = ""):
        counts[name] = counts.get(name, 0) + 1
        if not ok:
            failures.append(f"{name}[{counts[name]}]: {detail}")

    for i in range(instances):
        dim = rng.next_int(1, 2)
        # pairwise identities on homogeneous tensors
        kx, ky = rng.next_int(0, 4), rng.next_int(0, 4)
        X = corpus.random_symtensor(rng, dim, kx, 3 if kx <= 2 else 1)
        Y = corpus.random_symtensor(rng, dim, ky, 3 if ky <= 2 else 1)
        br = schouten.schouten_bracket(X, Y)
        check("antisymmetry", (br + schouten.schouten_bracket(Y, X)).is_zero())
        check("grading", br.is_zero() or br.order == max(kx + ky - 1, 0))

        # graded identities
        A = corpus.random_graded(rng, dim)
        B = corpus.random_graded(rng, dim)
        C = corpus.random_graded(rng, dim)
        jac = (
            schouten.schouten_graded(A, schouten.schouten_graded(B, C, order_cap), order_cap)
            + schouten.schouten_graded(B, schouten.schouten_graded(C, A, order_cap), order_cap)
            + schouten.schouten_graded(C, schouten.schouten_graded(A, B, order_cap), order_cap)
        )
        check("jacobi", jac.is_zero())

        # matched-pair structure
        s1 = corpus.random_spair(rng, dim)
        s2 = corpus.random_spair(rng, dim)
        n1 = corpus.random_npart(rng, dim)
        n2 = corpus.random_npart(rng, dim)
        total = schouten.schouten_graded(n1.graded, s1.to_graded(), order_cap)
        sp, npart = schouten.split(total)
        check(
            "action_reconstruction",
            sp == schouten.act_left(n1, s1) and npart == schouten.act_right(n1, s1),
        )
        ds, dn = schouten.double_cross_bracket((s1, n1), (s2, n2), order_cap)
        ts, tn = schouten.split(
            schouten.schouten_graded(schouten.embed(s1, n1), schouten.embed(s2, n2), order_cap)
        )
        check("double_cross_total", ds == ts and dn == tn)
        r_s, r_n = schouten.compat_residuals(s1, s2, n1, n2, order_cap)
        check("compatibility", r_s.is_zero() and r_n.is_zero())
        check("n_closure", all(o >= 2 for o in schouten.bracket_n(n1, n2, order_cap).orders()))

        # phase-space side
        hx = phasealg.kappa(A)
        hy = phasealg.kappa(B)
        lhs = phasealg.kappa(schouten.schouten_graded(A, B, order_cap))
        check("kappa_homomorphism", lhs == -phasealg.canonical_bracket(hx, hy))
        check("kappa_bijection", phasealg.kappa_inv(hx) == A)
        check("gccl_composition", phasealg.gccl(A) == phasealg.hamiltonian_field(hx))
        check(
            "hamfield_homomorphism",
            phasealg.jacobi_lie_bracket(
                phasealg.hamiltonian_field(hx), phasealg.hamiltonian_field(hy)
            )
            == phasealg.hamiltonian_field(phasealg.canonical_bracket(hx, hy)),
        )
    return counts, failures


def cmd_verify_algebra(ctx: RunContext) -> int:
    ctx.tolerance("exact_identities", 0.0)
    counts, failures = exact_algebra_suite(ctx.config.seed, 100, max(ctx.config.order_cap, 10))
    ctx.result("identity_counts", counts)
    ctx.result("failures", failures)
    report = ["exact algebra identity suite"]
    for name in sorted(counts):
        report.append(f"  {name}: {counts[name]} instances, residual exactly 0")
    if failures:
        report.append("FAILURES:")
        report.extend(f"  {f}" for f in failures)
    else:
        report.append("all exact identities hold")
    ctx.write_text("verify-algebra.txt", "\n".join(report) + "\n")
    ctx.say("\n".join(report))
    ctx.finish()
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# numerical dual suite


def _random_state_and_fields(rng: Lcg64, grid: SpatialGrid, K: int):
    state = momentdyn.MomentState(
        corpus.random_trig(rng, grid, 3, 0.5, mean=2.0),
        corpus.random_trig(rng, grid, 3, 0.5),
        [corpus.random_trig(rng, grid, 3, 0.5) for _ in range(K - 1)],
    )
    slots = {k: corpus.random_trig(rng, grid, 2, 0.5) for k in range(K + 1)
             if rng.next_int(0, 3) > 0}
    return state, momentdyn.ContraField(grid, slots)


def decomposition_identity_suite(seed: int, Nq: int, K: int, instances: int = 50) -> float:
    """Max pointwise gap between the matched and the direct coadjoint assembly."""
    rng = Lcg64(seed)
    grid = SpatialGrid(2.0 * np.pi, Nq)
    worst = 0.0
    for _ in range(instances):
        state, X = _random_state_and_fields(rng, grid, K)
        full = momentdyn.coad_full(X, state)
        matched = momentdyn.matched_coadjoint(
            (X.order(0), X.order(1)), X.n_part(), state
        )
        gap = (full - matched).max_abs()
        worst = max(worst, gap)
    return worst


def adjointness_suite(seed: int, Nq: int, K: int, scheme: Scheme, instances: int = 25) -> float:
    """Max relative defect of <ad*_X S, Y> = <S, [Y, X]> on trig data.

    The right side realizes the graded bracket with spectrally exact
    derivatives (band-limited data), independently of the coadjoint path.
    """
    rng = Lcg64(seed)
    grid = SpatialGrid(2.0 * np.pi, Nq)
    worst = 0.0
    for _ in range(instances):
        state, X = _random_state_and_fields(rng, grid, K)
        Y = momentdyn.ContraField(
            grid, {k: corpus.random_trig(rng, grid, 2, 0.5) for k in range(K)}
        )
        lhs = 0.0
        out = momentdyn.coad_full(X, state, scheme)
        for m in range(K + 1):
            y_m = Y.order(m)
            if y_m is not None:
                lhs += quad_q(out.order(m) * y_m)
        rhs = 0.0
        for m in Y.orders():
            for k in X.orders():
                if k == 0 and m == 0:
                    continue
                out_order = m + k - 1
                if out_order > K or out_order < 0:
                    continue
                br = momentdyn.grid_schouten(Y.order(m), m, X.order(k), k, Scheme.FOURIER)
                rhs += quad_q(state.order(out_order) * br)
        scale = max(abs(lhs), abs(rhs), 1e-30)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def jlp_adjointness_suite(seed: int, Nq: int, Np: int, Pmax: float, instances: int = 50) -> float:
    """Max relative defect of <J_LP(Pi)(X_h), X_g> = <Pi, X_{ {g,h} }>."""
    rng = Lcg64(seed)
    grid = PhaseGrid(SpatialGrid(2.0 * np.pi, Nq), Pmax, Np)
    worst = 0.0
    for _ in range(instances):
        Pi = momvlasov.OneFormGrid(
            corpus.random_phase_decaying(rng, grid, 2, 2),
            corpus.random_phase_decaying(rng, grid, 2, 2),
        )
        h = corpus.random_phase_polyp(rng, grid, 2, 2)
        g = corpus.random_phase_polyp(rng, grid, 2, 2)
        Xh = momvlasov.hamfield_of(h)
        Xg = momvlasov.hamfield_of(g)
        out = momvlasov.j_lp_apply(Pi, Xh)
        lhs = momvlasov.pairing_direct(out, Xg)
        bracket = kinetic.phase_bracket(g, h)
        rhs = momvlasov.pairing_direct(Pi, momvlasov.hamfield_of(bracket))
        scale = max(abs(lhs), abs(rhs), 1e-30)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def fd4_adjointness_orders(seed: int, K: int, resolutions=(32, 64, 128)) -> list[float]:
    """Measured convergence order of the FD4 adjointness defect under refinement."""
    defects = []
    for Nq in resolutions:
        defects.append(max(adjointness_suite(seed, Nq, K, Scheme.FD4, 5), 1e-300))
    return [float(np.log2(defects[i] / defects[i + 1])) for i in range(len(defects) - 1)]


def cmd_verify_dual(ctx: RunContext) -> int:
    cfg = ctx.config
    ctx.tolerance("decomposition_identity_pointwise", 1e-12)
    ctx.tolerance("adjointness_rel_fourier", 1e-8)
    ctx.tolerance("jlp_adjointness_rel", 1e-8)
    ctx.tolerance("fd4_order_window", [3.7, 4.3])
    failures = []

    gap = decomposition_identity_suite(cfg.seed, 64, cfg.K, 50)
    ctx.result("decomposition_identity_max_gap", gap)
    ctx.say(f"decomposition identity, 50 instances: max pointwise gap {gap:.3e}")
    if gap > 1e-12:
        failures.append(f"decomposition identity gap {gap:.3e} > 1e-12")

    adj = adjointness_suite(cfg.seed + 1, 64, cfg.K, Scheme.FOURIER, 25)
    ctx.result("adjointness_fourier_max_rel", adj)
    ctx.say(f"moment adjointness (Fourier): max relative defect {adj:.3e}")
    if adj > 1e-8:
        failures.append(f"Fourier adjointness defect {adj:.3e} > 1e-8")

    orders = fd4_adjointness_orders(cfg.seed + 2, cfg.K)
    ctx.result("fd4_adjointness_orders", orders)
    ctx.say(f"FD4 adjointness refinement orders: {['%.2f' % o for o in orders]}")
    if not any(3.7 <= o <= 4.3 for o in orders):
        failures.append(f"FD4 convergence orders {orders} outside [3.7, 4.3]")

    jlp = jlp_adjointness_suite(cfg.seed + 3, 64, 128, 10.0, 50)
    ctx.result("jlp_adjointness_max_rel", jlp)
    ctx.say(f"J_LP adjointness, 50 instances: max relative defect {jlp:.3e}")
    if jlp > 1e-8:
        failures.append(f"J_LP adjointness defect {jlp:.3e} > 1e-8")

    ctx.result("failures", failures)
    ctx.write_text(
        "verify-dual.txt",
        "\n".join(
            [
                f"decomposition identity max gap: {gap:.6e}",
                f"Fourier adjointness max relative defect: {adj:.6e}",
                f"FD4 adjointness orders: {orders}",
                f"J_LP adjointness max relative defect: {jlp:.6e}",
            ]
            + (["FAILURES:"] + failures if failures else ["all dual-pairing checks hold"])
        )
        + "\n",
    )
    ctx.finish()
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# simulation runners


def standard_kinetic_initial(cfg: Config) -> tuple[kinetic.KineticState, kinetic.VlasovParams]:
    """Weakly perturbed Maxwellian: f0 = (1 + 0.01 cos(2 pi q/L)) G(p)."""
    grid = PhaseGrid(SpatialGrid(cfg.L, cfg.Nq), cfg.Pmax, cfg.Np)
    q, p = grid.meshes()
    maxwell = np.exp(-0.5 * p**2) / np.sqrt(2.0 * np.pi)
    pert = 1.0 + 0.01 * np.cos(2.0 * np.pi * q / cfg.L)
    f = GridFn(grid, pert * maxwell)
    params = kinetic.VlasovParams(m=cfg.m, e=cfg.e, field_mode=cfg.field_mode)
    state = kinetic.refresh_phi(kinetic.KineticState(f, GridFn.zeros(grid.spatial)), params)
    return state, params


def cmd_run_vlasov(ctx: RunContext) -> int:
    cfg = ctx.config
    state, params = standard_kinetic_initial(cfg)
    edge = max(np.max(np.abs(state.f.values[:, 0])), np.max(np.abs(state.f.values[:, -1])))
    if edge > 1e-12 * state.f.max_abs():
        ctx.say(f"warning: initial |f| at p-boundary is {edge:.2e}; consider a larger Pmax")
        ctx.note("boundary_warning", float(edge))
    steps = int(round(cfg.t_end / cfg.dt))
    ctx.note("initial_profile", "f0 = (1 + 0.01 cos(2 pi q/L)) exp(-p^2/2)/sqrt(2 pi)")
    ctx.note("energy_normalization",
             "E = int p^2/(2m) f dq dp + 1/2 int (phi')^2 dq (phi carries the e scaling)")
    snapshots = [("0", state.f)]
    conservation = []
    for n in range(steps + 1):
        mass, l2, energy = kinetic.kinetic_diagnostics(state, params)
        conservation.append((state.t, mass, l2, energy))
        if n < steps:
            state = kinetic.step(state, params, cfg.dt)
    snapshots.append((f"{state.t:.17g}", state.f))
    ctx.write_text("conservation.csv", _csv(conservation, "t,mass,l2,energy"))
    for label, f in snapshots:
        rows = []
        qv, pv = f.grid.spatial.nodes, f.grid.p_nodes
        for i in range(f.grid.spatial.Nq):
            for j in range(f.grid.Np):
                rows.append((float(label), qv[i], pv[j], f.values[i, j]))
        ctx.write_text(f"f_t{label}.csv", _csv(rows, "t,q,p,f"))
    rows = []
    for m in range(cfg.K + 1):
        mom = moment_quad(state.f, m)
        for qv, val in zip(mom.grid.nodes, mom.values):
            rows.append((state.t, m, qv, val))
    ctx.write_text("moments.csv", _csv(rows, "t,m,q,value"))
    first, last = conservation[0], conservation[-1]
    drift = {
        "mass_rel_drift": abs(last[1] - first[1]) / abs(first[1]),
        "l2_rel_change": (first[2] - last[2]) / first[2],
        "energy_rel_drift": abs(last[3] - first[3]) / abs(first[3]),
    }
    ctx.result("conservation", drift)
    ctx.say(f"run-vlasov: {steps} steps to t={state.t:.4g}; drifts {drift}")
    return ctx.finish()


def cmd_run_moments(ctx: RunContext) -> int:
    cfg = ctx.config
    grid = SpatialGrid(cfg.L, cfg.Nq)
    scheme = cfg.scheme_enum
    w = momentdyn.polytropic(1.0, 2.0)
    q = grid.nodes
    state = momentdyn.MomentState(
        GridFn(grid, 1.0 + 0.2 * np.sin(2.0 * np.pi * q / cfg.L)),
        GridFn(grid, 0.1 * np.cos(2.0 * np.pi * q / cfg.L)),
        [GridFn.zeros(grid) for _ in range(cfg.K - 1)],
    )
    ctx.note("hamiltonian", "fluid: H = 1/2 int M^2/rho + int rho w, w = rho (polytropic gamma=2)")
    ctx.note("bernoulli_half_factor", cfg.bernoulli_half_factor)
    report = momentdyn.TruncationReport()

    def rhs(s: momentdyn.MomentState) -> momentdyn.MomentState:
        sigma, Y = momentdyn.euler_variational(w, s.rho, s.M, cfg.bernoulli_half_factor)
        slots = momentdyn.ContraField(grid, {0: sigma, 1: Y})
        return momentdyn.lp_rhs(slots, s, scheme)

    # one probe evaluation to collect the truncation report
    momentdyn.lp_rhs(
        momentdyn.ContraField(grid, {0: state.rho, 1: state.M, cfg.K: state.rho}),
        state, scheme, report,
    )
    ctx.write_text("truncation-report.txt", str(report) + "\n")
    steps = int(round(cfg.t_end / cfg.dt))
    series = []
    conservation = []
    t = 0.0
    for n in range(steps + 1):
        conservation.append((t, quad_q(state.rho), momentdyn.fluid_energy(w, state.rho, state.M)))
        if n % max(1, steps // 8) == 0 or n == steps:
            for m in range(cfg.K + 1):
                fld = state.order(m)
                for qv, val in zip(grid.nodes, fld.values):
                    series.append((t, m, qv, val))
        if n < steps:
            state = momentdyn.rk4_step(rhs, state, cfg.dt)
            t += cfg.dt
    ctx.write_text("moments-series.csv", _csv(series, "t,order,q,value"))
    ctx.write_text("conservation.csv", _csv(conservation, "t,mass,energy"))
    first, last = conservation[0], conservation[-1]
    ctx.result("mass_rel_drift", abs(last[1] - first[1]) / abs(first[1]))
    ctx.result("energy_rel_drift", abs(last[2] - first[2]) / abs(first[2]))
    ctx.say(f"run-moments: {steps} RK4 steps; mass drift {ctx.manifest['results']['mass_rel_drift']:.3e}")
    return ctx.finish()


def standard_oneform_initial(cfg: Config) -> momvlasov.OneFormGrid:
    grid = PhaseGrid(SpatialGrid(cfg.L, cfg.Nq), cfg.Pmax, cfg.Np)
    q, p = grid.meshes()
    envelope = np.exp(-0.5 * p**2)
    pi_q = 0.1 * np.sin(2.0 * np.pi * q / cfg.L) * (1.0 + p) * envelope
    pi_p = 0.1 * np.cos(2.0 * np.pi * q / cfg.L) * p * envelope
    return momvlasov.OneFormGrid(GridFn(grid, pi_q), GridFn(grid, pi_p))


def cmd_run_momvlasov(ctx: RunContext) -> int:
    cfg = ctx.config
    Pi = standard_oneform_initial(cfg)
    params = kinetic.VlasovParams(m=cfg.m, e=cfg.e, field_mode=cfg.field_mode)
    steps = int(round(cfg.t_end / cfg.dt))
    scheme = cfg.scheme_enum

    def rhs(state: momvlasov.OneFormGrid) -> momvlasov.OneFormGrid:
        return momvlasov.momvlasov_rhs(state, params, None, scheme)

    rows = []

    def snap(t, form):
        qv, pv = form.grid.spatial.nodes, form.grid.p_nodes
        for i in range(form.grid.spatial.Nq):
            for j in range(form.grid.Np):
                rows.append((t, qv[i], pv[j], form.Pi_q.values[i, j], form.Pi_p.values[i, j]))

    snap(0.0, Pi)
    t = 0.0
    for _ in range(steps):
        Pi = momentdyn.rk4_step(rhs, Pi, cfg.dt)
        t += cfg.dt
    snap(t, Pi)
    ctx.write_text("oneform.csv", _csv(rows, "t,q,p,Pi_q,Pi_p"))
    err = momvlasov.intertwine_check(Pi, params, None, scheme)
    ctx.result("final_intertwine_error", err)
    ctx.say(f"run-momvlasov: {steps} RK4 steps; final intertwine error {err:.3e}")
    return ctx.finish()


def poisson_map_setup(cfg: Config):
    grid = PhaseGrid(SpatialGrid(cfg.L, cfg.Nq), cfg.Pmax, cfg.Np)
    q, p = grid.meshes()
    f = GridFn(grid, (1.0 + 0.3 * np.sin(2.0 * np.pi * q / cfg.L))
               * np.exp(-0.5 * p**2) / np.sqrt(2.0 * np.pi))
    phi = GridFn(grid.spatial, 0.05 * np.cos(2.0 * np.pi * grid.spatial.nodes / cfg.L))
    params = kinetic.VlasovParams(m=cfg.m, e=cfg.e, field_mode="prescribed", prescribed_phi=phi)
    return f, params


def cmd_check_poisson_map(ctx: RunContext) -> int:
    cfg = ctx.config
    ctx.tolerance("poisson_map_rel_error", 1e-4)
    f, params = poisson_map_setup(cfg)
    errors = kinetic.poisson_map_check(f, params, cfg.K, cfg.scheme_enum)
    refined = dataclasses.replace(cfg, Nq=cfg.Nq * 2, Np=cfg.Np * 2)
    f2, params2 = poisson_map_setup(refined)
    errors2 = kinetic.poisson_map_check(f2, params2, cfg.K, cfg.scheme_enum)
    rows = [(m, errors[m]) for m in range(cfg.K + 1)]
    ctx.write_text("poisson-map.csv", _csv(rows, "order,rel_error"))
    ctx.result("rel_errors", [float(e) for e in errors])
    ctx.result("rel_errors_refined", [float(e) for e in errors2])
    ok = bool(np.all(errors <= 1e-4)) and bool(
        np.all(errors2 <= np.maximum(errors, 1e-10) * 1.5)
    )
    ctx.say(f"poisson-map errors: {errors}; refined: {errors2}")
    ctx.finish()
    return 0 if ok else 1


def cmd_check_intertwine(ctx: RunContext) -> int:
    cfg = ctx.config
    ctx.tolerance("intertwine_error", 1e-5)
    params = kinetic.VlasovParams(m=cfg.m, e=cfg.e, field_mode="prescribed")
    rows = []
    errors = []
    for factor in (1, 2):
        sub = dataclasses.replace(cfg, Nq=cfg.Nq * factor, Np=cfg.Np * factor)
        grid = PhaseGrid(SpatialGrid(sub.L, sub.Nq), sub.Pmax, sub.Np)
        q, p = grid.meshes()
        envelope = np.exp(-0.5 * p**2)
        Pi = momvlasov.OneFormGrid(
            GridFn(grid, 0.2 * np.sin(2.0 * np.pi * q / sub.L) * (1.0 + 0.5 * p) * envelope),
            GridFn(grid, 0.2 * np.cos(2.0 * np.pi * q / sub.L) * (1.0 - 0.3 * p) * envelope),
        )
        phi = GridFn(grid.spatial, 0.1 * np.cos(2.0 * np.pi * grid.spatial.nodes / sub.L))
        prm = dataclasses.replace(params, prescribed_phi=phi)
        err = momvlasov.intertwine_check(Pi, prm, phi, sub.scheme_enum)
        rows.append((f"Nq={sub.Nq},Np={sub.Np}", err))
        errors.append(err)
    ctx.write_text("intertwine.csv", _csv(rows, "resolution,error"))
    order = float(np.log2(errors[0] / max(errors[1], 1e-300)))
    ctx.result("errors", errors)
    ctx.result("refinement_order", order)
    ctx.say(f"intertwine errors {errors}, refinement order {order:.2f}")
    ctx.finish()
    return 0 if errors[0] <= 1e-5 and order >= 3.0 else 1


def cmd_dump(ctx: RunContext) -> int:
    cfg = ctx.config
    rng = Lcg64(cfg.seed)
    lines = ["# canonical text dumps of seeded algebra objects"]
    poly = corpus.random_poly(rng, 2, 3, 3)
    lines.append(f"poly: {poly.to_text()}")
    tensor = corpus.random_symtensor(rng, 2, 2)
    lines.append(f"tensor: {tensor.to_text()}")
    graded = corpus.random_graded(rng, 1, 3)
    lines.append(f"graded: {graded.to_text()}")
    lines.append(f"phase: {phasealg.kappa(graded).to_text()}")
    ctx.write_text("algebra-dump.txt", "\n".join(lines) + "\n")
    grid = SpatialGrid(cfg.L, cfg.Nq)
    gd = corpus.random_graded(rng, 1, 2)
    ctx.write_text("sampled-order0.csv", to_csv(sample(gd.part(0), grid)))
    ctx.say("\n".join(lines))
    return ctx.finish()


# ---------------------------------------------------------------------------
# CLI


COMMANDS = {
    "verify-algebra": cmd_verify_algebra,
    "verify-dual": cmd_verify_dual,
    "run-moments": cmd_run_moments,
    "run-vlasov": cmd_run_vlasov,
    "run-momvlasov": cmd_run_momvlasov,
    "check-poisson-map": cmd_check_poisson_map,
    "check-intertwine": cmd_check_intertwine,
    "dump": cmd_dump,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="momentpair",
        description="verification suites and desk-scale runs for matched-pair kinetic dynamics",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="path to a 'key = value' config file")
    parser.add_argument("--out", default=None, help="output directory (default out-<subcommand>)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--quiet", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
            config.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out) if args.out else Path(f"out-{args.subcommand}")
    ctx = RunContext(outdir, args.subcommand, config, args.quiet)
    try:
        return COMMANDS[args.subcommand](ctx)
    except (RuntimeError, ValueError, momvlasov.GaugeError, momvlasov.PairingMismatchError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
