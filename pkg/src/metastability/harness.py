"""Experiment configuration, commands and seeded verification suites.

Every command returns a :class:`RunReport` whose ``inputs`` field echoes the
full configuration, so ``rerun(report.to_dict())`` reproduces it.
"""

from __future__ import annotations

import csv
import itertools
import json
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from metastability import rates, spaces
from metastability.gexpr import g_func, parse_g, parse_rational, parse_u
from metastability.rates import BoundValue, Modulus, ModulusError


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit status 2)."""


SUITES = ("rates", "spaces", "all")
MODES = ("exact", "log2")


@dataclass
class ExperimentConfig:
    space: str = "l2:2"
    recipe: str = "identity"
    x: str = "e0"
    eps: Fraction = Fraction(1, 2)
    g: str = "const 1"
    d: int = 1
    n_cap: int = 200
    digit_budget: int = rates.DEFAULT_DIGIT_BUDGET
    mode: str = "exact"
    seed: int = 0
    out: Optional[str] = None
    modulus: str = "auto"
    u_override: Optional[str] = None
    norm_bound: Optional[Fraction] = None
    trials: int = 100
    suite: str = "all"

    def __post_init__(self):
        self.eps = parse_rational(self.eps)
        if self.norm_bound is not None:
            self.norm_bound = parse_rational(self.norm_bound)

    def validate(self) -> ExperimentConfig:
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if not 1 <= self.d <= 8:
            raise ConfigError("d must lie in [1, 8]")
        if not 0 <= self.n_cap <= spaces.MAX_AVERAGE_INDEX:
            raise ConfigError(f"n_cap must lie in [0, {spaces.MAX_AVERAGE_INDEX}]")
        if self.digit_budget < 1:
            raise ConfigError("digit budget must be positive")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.suite not in SUITES:
            raise ConfigError(f"suite must be one of {SUITES}")
        if self.norm_bound is not None and self.norm_bound <= 0:
            raise ConfigError("norm bound must be positive")
        try:
            parse_g(self.g)
            if self.u_override is not None:
                parse_u(self.u_override)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["eps"] = str(self.eps)
        out["norm_bound"] = None if self.norm_bound is None else str(self.norm_bound)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class RunReport:
    command: str
    inputs: dict
    theta: Optional[dict] = None
    witness: Optional[int] = None
    verdict: Optional[str] = None
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def ok(self) -> bool:
        return self.verdict != "FAIL" and all(c["failed"] == 0 for c in self.checks.values())

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# building inputs


def load_modulus(path) -> Modulus:
    """Read a power-law modulus ``coefficient * min(eps, 2)**exponent`` from JSON.

    The file holds ``{"coefficient": "1/8", "exponent": 2, "factorized": true}``.
    Only the range (0, 1] and monotonicity on a sample grid are validated.
    """
    try:
        data = json.loads(Path(path).read_text())
        eta = rates.power_modulus(parse_rational(data["coefficient"]), int(data["exponent"]),
                                  bool(data.get("factorized", False)))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot load modulus from {path}: {exc}") from None
    grid = [Fraction(k, 16) for k in range(1, 33)]
    values = [eta(e) for e in grid]
    if any(b < a for a, b in zip(values, values[1:])):
        raise ModulusError(f"modulus from {path} is not nondecreasing on (0, 2]")
    return eta


def parse_space(text: str, modulus: str = "auto") -> spaces.NormedSpace:
    parts = text.split(":")
    try:
        if parts[0] == "l2" and len(parts) == 2:
            p, dim = Fraction(2), int(parts[1])
        elif parts[0] == "lp" and len(parts) == 3:
            p, dim = parse_rational(parts[1]), int(parts[2])
        else:
            raise ValueError("expected l2:DIM or lp:P:DIM")
        if modulus == "auto":
            eta = None
        elif modulus == "hilbert":
            if p != 2:
                raise ValueError("the Hilbert modulus applies only to l2")
            eta = rates.eta_hilbert()
        elif modulus.startswith("file:"):
            eta = load_modulus(modulus[5:])
        else:
            raise ValueError(f"unknown modulus {modulus!r}")
        return spaces.NormedSpace(dim, p, eta)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad space {text!r}: {exc}") from None


def make_u(cfg: ExperimentConfig, space: spaces.NormedSpace) -> Callable:
    if cfg.u_override is not None:
        return parse_u(cfg.u_override)
    return rates.u_from_eta(space.modulus)


def _theta(cfg, u, mode, log_fallback):
    g = g_func(cfg.g)
    kw = dict(mode=mode, digit_budget=cfg.digit_budget, log_fallback=log_fallback)
    if cfg.norm_bound is not None:
        return rates.theta_scaled(u, cfg.d, cfg.norm_bound, cfg.eps, g, **kw)
    return rates.theta(u, cfg.d, cfg.eps, g, **kw)


def _setup(cfg):
    space = parse_space(cfg.space, cfg.modulus)
    rng = np.random.default_rng(cfg.seed)
    try:
        fam = spaces.build_family(space, cfg.recipe, cfg.d, rng)
        x = spaces.make_vector(space, cfg.x, rng)
    except (spaces.ConstructionError, spaces.PreconditionError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return space, fam, x


# ---------------------------------------------------------------------------
# commands


def cmd_bounds(cfg: ExperimentConfig) -> RunReport:
    """Theta for the configuration; exact mode fails past the digit budget."""
    cfg.validate()
    t0 = time.perf_counter()
    space = parse_space(cfg.space, cfg.modulus)
    value = _theta(cfg, make_u(cfg, space), cfg.mode, log_fallback=False)
    return RunReport("bounds", cfg.to_dict(), theta=value.to_dict(),
                     wall_clock=time.perf_counter() - t0)


def verdict_for(theta: BoundValue, witness: Optional[int], n_cap: int) -> str:
    """CONFIRMED, CONSISTENT, INCONCLUSIVE or FAIL."""
    if witness is None:
        if theta.is_exact and theta.exact_value <= n_cap:
            return "FAIL"
        return "INCONCLUSIVE"
    if not theta.admits(witness):
        return "FAIL"
    return "CONFIRMED" if theta.is_exact else "CONSISTENT"


def cmd_metastable(cfg: ExperimentConfig) -> RunReport:
    """Least empirical witness against the rate; exact mode falls back to log2 bounds."""
    cfg.validate()
    t0 = time.perf_counter()
    space, fam, x = _setup(cfg)
    b = cfg.norm_bound if cfg.norm_bound is not None else Fraction(1)
    nx = space.norm(x)
    if nx > float(b) + spaces.NORM_SLACK:
        raise ConfigError(f"||x|| = {nx} exceeds the norm bound {b}; pass --norm-bound")
    theta = _theta(cfg, make_u(cfg, space), cfg.mode, log_fallback=True)
    # averages of x/b are the averages of x divided by b
    witness = spaces.metastability_witness(fam, x / float(b), cfg.eps / b, g_func(cfg.g), cfg.n_cap)
    verdict = verdict_for(theta, witness, cfg.n_cap)
    ok = verdict != "FAIL"
    return RunReport(
        "metastable", cfg.to_dict(), theta=theta.to_dict(), witness=witness, verdict=verdict,
        checks={"witness_within_theta": {"passed": int(ok), "failed": int(not ok)}},
        outputs={"x_norm": nx}, wall_clock=time.perf_counter() - t0,
    )


def simulate_rows(fam, x, g, n_cap) -> list[tuple[int, float, float]]:
    traj = spaces.Trajectory(fam, x)
    space = fam.space
    rows = []
    for n in range(n_cap + 1):
        window = traj.rows(n, n + g(n))
        rows.append((n, space.norm(window[0]), space.max_distance(window)))
    return rows


def cmd_simulate(cfg: ExperimentConfig) -> RunReport:
    """Write ``n, norm_xn, pairwise_osc`` for n = 0..n_cap to ``cfg.out``.

    ``pairwise_osc`` is the largest ``||x_i - x_j||`` over the window ``[n, n + g(n)]``.
    """
    cfg.validate()
    if not cfg.out:
        raise ConfigError("simulate needs --out PATH for the CSV")
    t0 = time.perf_counter()
    _, fam, x = _setup(cfg)
    rows = simulate_rows(fam, x, g_func(cfg.g), cfg.n_cap)
    path = Path(cfg.out)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "norm_xn", "pairwise_osc"])
            for n, a, b in rows:
                w.writerow([n, repr(a), repr(b)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return RunReport("simulate", cfg.to_dict(),
                     outputs={"csv": str(path), "rows": len(rows),
                              "final_norm": rows[-1][1], "final_osc": rows[-1][2]},
                     wall_clock=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# random instances (replayable from their descriptors)


def random_gexpr(rng, depth: int = 1) -> str:
    kind = rng.integers(4) if depth > 0 else rng.integers(3)
    if kind == 0:
        return f"const {rng.integers(0, 5)}"
    if kind == 1:
        return "id"
    if kind == 2:
        return f"affine {rng.integers(0, 3)} {rng.integers(0, 4)}"
    return f"comp {random_gexpr(rng, depth - 1)} {random_gexpr(rng, depth - 1)}"


SEQUENCE_FAMILIES = ("periodic", "harmonic", "modular", "bounce", "linear_drop")


def random_sequence_desc(rng) -> dict:
    fam = SEQUENCE_FAMILIES[rng.integers(len(SEQUENCE_FAMILIES))]
    if fam == "periodic":
        den = int(rng.integers(1, 9))
        return {"family": fam, "table": [f"{int(rng.integers(0, den + 1))}/{den}"
                                         for _ in range(int(rng.integers(1, 8)))]}
    if fam == "harmonic":
        return {"family": fam, "offset": int(rng.integers(0, 5))}
    if fam == "modular":
        return {"family": fam, "mult": int(rng.integers(1, 20)), "add": int(rng.integers(0, 20)),
                "mod": int(rng.integers(2, 12))}
    if fam == "bounce":
        return {"family": fam, "offset": int(rng.integers(0, 3))}
    return {"family": fam, "steps": int(rng.integers(1, 30))}


def sequence_from_desc(desc: dict) -> Callable[[int], Fraction]:
    fam = desc["family"]
    if fam == "periodic":
        table = [Fraction(t) for t in desc["table"]]
        return lambda n: table[n % len(table)]
    if fam == "harmonic":
        c = desc["offset"]
        return lambda n: Fraction(1, n + 1 + c)
    if fam == "modular":
        a, b, m = desc["mult"], desc["add"], desc["mod"]
        return lambda n: Fraction((a * n + b) % m, m - 1)
    if fam == "bounce":
        c = desc["offset"]
        return lambda n: Fraction(1, n + 1 + c) if n % 2 == 0 else 1 - Fraction(1, n + 2 + c)
    if fam == "linear_drop":
        k = desc["steps"]
        return lambda n: max(Fraction(0), 1 - Fraction(n, k))
    raise ValueError(f"unknown sequence family {fam!r}")


def random_double_desc(rng) -> dict:
    kind = ("diagonal", "product", "table")[rng.integers(3)]
    if kind == "diagonal":
        return {"kind": kind, "inner": random_sequence_desc(rng)}
    if kind == "product":
        return {"kind": kind, "left": random_sequence_desc(rng), "right": random_sequence_desc(rng)}
    r, c = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    den = int(rng.integers(1, 9))
    return {"kind": kind, "table": [[f"{int(rng.integers(0, den + 1))}/{den}" for _ in range(c)]
                                    for _ in range(r)]}


def double_sequence_from_desc(desc: dict) -> Callable[[int, int], Fraction]:
    kind = desc["kind"]
    if kind == "diagonal":
        a = sequence_from_desc(desc["inner"])
        return lambda m, n: a(m + n)
    if kind == "product":
        a, b = sequence_from_desc(desc["left"]), sequence_from_desc(desc["right"])
        return lambda m, n: a(m) * b(n)
    table = [[Fraction(t) for t in row] for row in desc["table"]]
    return lambda m, n: table[m % len(table)][n % len(table[0])]


EPS_CHOICES = (Fraction(1), Fraction(1, 2), Fraction(1, 4))


# ---------------------------------------------------------------------------
# properties: each takes a Generator and returns (ok, instance descriptor)


def prop_pairing(rng):
    m, n = (int(v) for v in rng.integers(0, 10**6, size=2))
    c = rates.cantor_pair(m, n)
    s = max(m, n) + int(rng.integers(0, 10))
    ok = rates.cantor_unpair(c) == (m, n) and m <= c and n <= c and c <= rates.f_quad(s)
    return ok, {"m": m, "n": n, "s": s}


def prop_majorant(rng):
    table = [int(v) for v in rng.integers(0, 50, size=int(rng.integers(1, 30)))]
    g = rates.FuncNN(lambda i: table[i % len(table)])
    gm = [rates.monotone_majorant(g, i) for i in range(2 * len(table))]
    ok = all(gm[i] >= g(i) for i in range(len(gm))) and all(a <= b for a, b in zip(gm, gm[1:]))
    ok &= gm == [max(g(j) for j in range(i + 1)) for i in range(len(gm))]
    mono = rates.FuncNN(lambda i: 3 * i + 1)
    ok &= all(rates.monotone_majorant(mono, i) == mono(i) for i in range(20))
    return ok, {"table": table}


def prop_big_G_monotone(rng):
    e1, e2 = sorted((EPS_CHOICES[rng.integers(3)], EPS_CHOICES[rng.integers(3)]))
    k = int(rng.integers(0, 4))
    ga, gb = f"affine 1 {k}", f"affine 2 {k + int(rng.integers(0, 3))}"
    G = lambda e, s: rates.big_G(e, g_func(s)).exact_value  # noqa: E731
    ok = G(e1, ga) >= G(e2, ga) and G(e1, ga) <= G(e1, gb)
    return ok, {"eps": [str(e1), str(e2)], "g": [ga, gb]}


def prop_glb(rng):
    desc = random_sequence_desc(rng)
    eps = EPS_CHOICES[rng.integers(3)]
    gtext = random_gexpr(rng)
    a, g = sequence_from_desc(desc), g_func(gtext)
    inst = {"sequence": desc, "eps": str(eps), "g": gtext}
    N = rates.glb_witness(a, eps, g)
    bound = rates.glb_bound(eps, g)
    ok = N <= bound and all(a(N) <= a(s) + eps for s in range(g(N) + 1))
    inst.update(N=N, bound=bound)
    return ok, inst


def prop_glb2(rng):
    desc = random_double_desc(rng)
    eps = EPS_CHOICES[rng.integers(3)]
    gtext = random_gexpr(rng)
    a, g = double_sequence_from_desc(desc), g_func(gtext)
    inst = {"sequence": desc, "eps": str(eps), "g": gtext}
    N, p, q = rates.glb2_witness(a, eps, g)
    G = rates.big_G(eps, g).exact_value
    top = g(N)
    ok = p <= N and q <= N <= G and all(
        a(p, q) <= a(i, j) + eps for i in range(top + 1) for j in range(top + 1))
    inst.update(N=N, p=p, q=q)
    return ok, inst


def prop_boundary(rng):
    d = int(rng.integers(1, 7))
    n = int(rng.integers(0, 41))
    Q = int(rng.integers(0, n + 1))
    count, bound = rates.boundary_count(n, Q, d)
    ok = count <= bound and ((count == bound) == (d <= 2 or Q == 0))
    return ok, {"n": n, "Q": Q, "d": d}


def prop_log_soundness(rng):
    d = int(rng.integers(1, 4))
    gtext = random_gexpr(rng)
    u = parse_u(f"const {rng.integers(1, 5)}")
    eps = Fraction(1, int(rng.integers(1, 4)))
    ex = rates.theta(u, d, eps, g_func(gtext))
    lg = rates.theta(u, d, eps, g_func(gtext), mode="log2")
    return lg.admits(ex.exact_value), {"d": d, "g": gtext, "u": str(u), "eps": str(eps)}


def prop_theta_const0(rng):
    d = int(rng.integers(1, 9))
    eps = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
    v = rates.theta(rates.u_from_eta(rates.eta_hilbert()), d, eps, g_func("const 0"))
    return v.exact_value == 0, {"d": d, "eps": str(eps)}


def _random_family(rng, d, dim, p=Fraction(2)):
    space = spaces.NormedSpace(dim, p)
    return spaces.build_family(space, "random", d, rng)


def prop_norm_bounded(rng):
    d, dim = int(rng.integers(1, 4)), int(rng.integers(1, 7))
    fam = _random_family(rng, d, dim)
    x = spaces.make_vector(fam.space, "random", rng)
    rows = spaces.Trajectory(fam, x).rows(0, 30)
    return bool(np.all(fam.space.norms(rows) <= 1 + spaces.NORM_SLACK)), {"d": d, "dim": dim}


def prop_separable(rng):
    d, dim, n = int(rng.integers(1, 4)), int(rng.integers(1, 6)), int(rng.integers(0, 9))
    fam = _random_family(rng, d, dim)
    x = spaces.make_vector(fam.space, "random", rng)
    total = np.zeros(dim)
    for k in itertools.product(range(n + 1), repeat=d):
        v = x
        for T, e in zip(fam.matrices, k):
            v = np.linalg.matrix_power(T, e) @ v
        total += v
    direct = total / (n + 1) ** d
    dev = max(float(np.max(np.abs(spaces.ergodic_average(fam, x, n) - direct))),
              float(np.max(np.abs(spaces.Trajectory(fam, x)[n] - direct))))
    return dev <= 1e-10, {"d": d, "dim": dim, "n": n, "deviation": dev}


def prop_claim1(rng):
    d, dim = int(rng.integers(1, 4)), int(rng.integers(1, 7))
    Q = int(rng.integers(0, 5))
    n = int(rng.integers(Q, 61))
    fam = _random_family(rng, d, dim)
    x = spaces.make_vector(fam.space, "random", rng) * rng.uniform(0.5, 1.0)
    w = spaces.ConvexWeights.random(Q, d, rng)
    inst = {"d": d, "dim": dim, "Q": Q, "n": n}
    try:
        residual, bound = spaces.claim1_residual(fam, x, w, n)
    except rates.InvariantViolation as exc:
        inst["error"] = str(exc)
        return False, inst
    inst.update(residual=residual, bound=bound)
    return True, inst


def _prop_uprop(rng, p):
    dim = int(rng.integers(1, 9))
    space = spaces.NormedSpace(dim, p)
    u = rates.u_from_eta(space.modulus)
    while True:
        x, y = spaces.random_unit_ball_pair(space, rng)
        dist = space.norm(x - y)
        if dist > 1e-6:
            break
    eps = Fraction(int(dist * rng.uniform(0.5, 1.0) * 10**9), 10**9)
    if eps == 0:
        eps = Fraction(1, 10**9)
    ok = spaces.uprop_check(space, u, x, y, eps)
    return ok, {"dim": dim, "p": str(p), "x": x.tolist(), "y": y.tolist(), "eps": str(eps)}


def prop_uprop_hilbert(rng):
    return _prop_uprop(rng, Fraction(2))


def prop_uprop_lp(rng):
    return _prop_uprop(rng, (Fraction(3, 2), Fraction(3), Fraction(4))[rng.integers(3)])


def prop_uniform_weights(rng):
    d, dim, Q = int(rng.integers(1, 4)), int(rng.integers(1, 6)), int(rng.integers(0, 5))
    fam = _random_family(rng, d, dim)
    x = spaces.make_vector(fam.space, "random", rng)
    z = spaces.convex_combination_z(fam, x, spaces.ConvexWeights.uniform(Q, d))
    dev = float(np.max(np.abs(z - spaces.ergodic_average(fam, x, Q))))
    return dev <= 1e-12, {"d": d, "dim": dim, "Q": Q, "deviation": dev}


def end_to_end_config(rng) -> ExperimentConfig:
    """A metastable run whose theta is exactly computable.

    Either the Hilbert modulus with eps in {2, 3/2}, or a u override with
    ``u(eps) >= 1`` and a small eps on an oscillating family.
    """
    seed = int(rng.integers(0, 2**31))
    if rng.integers(2) == 0:
        return ExperimentConfig(
            space=f"l2:{rng.integers(1, 5)}", recipe="random", x="random",
            eps=(Fraction(2), Fraction(3, 2))[rng.integers(2)], g=random_gexpr(rng, 0),
            d=int(rng.integers(1, 4)), n_cap=100, seed=seed)
    return ExperimentConfig(
        space=f"l2:{2 * rng.integers(1, 3)}", recipe=("rotation:random", "neg", "perm:random")[rng.integers(3)],
        x="random", eps=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 10))[rng.integers(3)],
        g=random_gexpr(rng, 0), d=int(rng.integers(1, 3)), n_cap=100, seed=seed,
        u_override=f"const {rng.integers(1, 3)}")


def prop_end_to_end(rng):
    cfg = end_to_end_config(rng)
    report = cmd_metastable(cfg)
    return report.verdict != "FAIL", {"config": cfg.to_dict(), "verdict": report.verdict,
                                      "witness": report.witness}


RATES_PROPERTIES = {
    "pairing": prop_pairing,
    "majorant": prop_majorant,
    "big_G_monotone": prop_big_G_monotone,
    "glb_single": prop_glb,
    "glb_double": prop_glb2,
    "boundary_count": prop_boundary,
    "log2_soundness": prop_log_soundness,
    "theta_const0": prop_theta_const0,
}

SPACES_PROPERTIES = {
    "norm_bounded": prop_norm_bounded,
    "separable_vs_direct": prop_separable,
    "claim1": prop_claim1,
    "uprop_hilbert": prop_uprop_hilbert,
    "uprop_lp": prop_uprop_lp,
    "uniform_weights": prop_uniform_weights,
    "end_to_end": prop_end_to_end,
}

MAX_RECORDED_FAILURES = 5


def run_property(name: str, prop, trials: int, seed: int, index: int = 0):
    """Run a property over seeded trials; trial t uses ``default_rng([seed, index, t])``."""
    passed, failures = 0, []
    for t in range(trials):
        rng = np.random.default_rng([seed, index, t])
        try:
            ok, inst = prop(rng)
        except (rates.MetastabilityError, ValueError) as exc:
            ok, inst = False, {"error": f"{type(exc).__name__}: {exc}"}
        if ok:
            passed += 1
        elif len(failures) < MAX_RECORDED_FAILURES:
            failures.append({"property": name, "trial": t, "seed": [seed, index, t],
                             "instance": inst})
    return passed, trials - passed, failures


def cmd_verify(suite: str = "all", trials: int = 100, seed: int = 0) -> RunReport:
    cfg = ExperimentConfig(suite=suite, trials=trials, seed=seed).validate()
    t0 = time.perf_counter()
    props = {}
    if suite in ("rates", "all"):
        props.update(RATES_PROPERTIES)
    if suite in ("spaces", "all"):
        props.update(SPACES_PROPERTIES)
    all_names = list(RATES_PROPERTIES) + list(SPACES_PROPERTIES)
    report = RunReport("verify", {"suite": suite, "trials": trials, "seed": seed})
    for name, prop in props.items():
        passed, failed, failures = run_property(name, prop, trials, seed, all_names.index(name))
        report.checks[name] = {"passed": passed, "failed": failed}
        report.failures.extend(failures)
    report.verdict = "PASS" if report.ok else "FAIL"
    report.wall_clock = time.perf_counter() - t0
    return report


COMMANDS = {"bounds": cmd_bounds, "simulate": cmd_simulate, "metastable": cmd_metastable}


def rerun(report: dict) -> RunReport:
    """Re-execute a report from its echoed inputs."""
    inputs = report["inputs"]
    if report["command"] == "verify":
        return cmd_verify(inputs["suite"], inputs["trials"], inputs["seed"])
    return COMMANDS[report["command"]](ExperimentConfig.from_dict(inputs))
