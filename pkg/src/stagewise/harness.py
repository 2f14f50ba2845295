"""Scenario files, construction runners and the verification registry.

A scenario is an INI file::

    [scenario]
    construction = scramble
    name = fix1-b03

    [horizon]
    x_max = 32
    e_max = 4
    s_max = 1000

    [fixtures]
    psi = builtin:fix1          # or table:rows.txt, programs:progs.txt

    [knobs]
    members = 0, 3
    settle = 20
    mode = pi2

    [output]
    dir = out/fix1-b03

Relative paths are resolved against the scenario file's directory.
"""

from __future__ import annotations

import configparser
import random
import time
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from . import fixtures as fx
from .approximation import LimitApprox, PathApprox, complement_string, rt_strings, settling_time
from .core import (Converged, Horizon, StagePartialMap, TableFamily, bits, eval_bounded, oracle_eval,
                   row_graph, value_at, word)
from .domination import (GenericState, canonical_witness, dominate_family, high_decide, high_witness,
                         run_generic, search_dominator)
from .errors import ConfigError, NotSettled
from .forcing import ForcingBounds, ForcingSequence, harrington_extend, jump_count, ndf_to_bi, run_forcing
from .mad import bsig2_partition, build_partition, check_psi, extend_mad
from .med import dnr_to_ed, med_construct, nth_prime, replay_pairwise_distinct, u_table
from .machine import ProgramFamily
from .scrambler import Mode, decode_indices, dependent_tree, encode_indices, scramble, scramble_dependent
from .trace import ConstructionTrace

FAMILIES: Dict[str, Callable[[], StagePartialMap]] = {
    "fix1": fx.fix1,
    "empty": fx.empty_family,
    "om1": fx.om1,
    "dyadic": fx.dyadic,
    "evens-odds": fx.evens_odds,
    "evens-evens": fx.evens_evens,
    "med4": fx.med4,
    "sixteen": fx.sixteen_machine,
    "halts-on-bit": fx.halts_on_bit,
    **{name: (lambda m=m: m) for name, m in fx.forcing_machines().items() if name != "halts-on-bit"},
}

TARGET_SETS: Dict[str, Callable[[int], int]] = {
    "evens": lambda x: int(x % 2 == 0),
    "odds": lambda x: x % 2,
    "zeros": lambda x: 0,
    "ones": lambda x: 1,
    "squares": lambda x: int(int(x ** 0.5) ** 2 == x),
}


def dependent_predicates(family: StagePartialMap, h: Horizon) -> Dict[str, Callable[[Tuple[int, ...]], bool]]:
    totals = {e for e in range(h.e_max) if row_graph(family, e, h) is not None}
    return {
        "increasing-total": lambda t: all(e in totals for e in t) and all(a < b for a, b in zip(t, t[1:])),
        "only-2": lambda t: t == (2,),
        "never": lambda t: False,
    }


# -- scenarios ----------------------------------------------------------------

@dataclass
class Scenario:
    construction: str
    horizon: Horizon
    name: str = "scenario"
    fixtures: Dict[str, str] = field(default_factory=dict)
    knobs: Dict[str, str] = field(default_factory=dict)
    output: Optional[Path] = None
    base: Path = Path(".")

    def knob_int(self, key: str, default: int, lo: int = 0, hi: Optional[int] = None) -> int:
        raw = self.knobs.get(key)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"knob {key}={raw!r} is not an integer") from None
        if value < lo or (hi is not None and value > hi):
            raise ConfigError(f"knob {key}={value} outside [{lo}, {'inf' if hi is None else hi}]")
        return value

    def knob_ints(self, key: str, default: Tuple[int, ...] = ()) -> Tuple[int, ...]:
        raw = self.knobs.get(key)
        if raw is None:
            return default
        try:
            return tuple(int(p) for p in raw.replace(",", " ").split())
        except ValueError:
            raise ConfigError(f"knob {key}={raw!r} is not a list of integers") from None

    def knob_choice(self, key: str, default: str, choices) -> str:
        value = self.knobs.get(key, default).strip()
        if value not in choices:
            raise ConfigError(f"knob {key}={value!r}; expected one of {sorted(choices)}")
        return value

    def path(self, ref: str) -> Path:
        p = Path(ref)
        return p if p.is_absolute() else self.base / p

    def family(self, key: str, default: Optional[str] = None) -> StagePartialMap:
        ref = self.fixtures.get(key, default)
        if ref is None:
            raise ConfigError(f"scenario {self.name!r} needs fixture {key!r}")
        scheme, _, rest = ref.partition(":")
        if scheme == "builtin":
            if rest not in FAMILIES:
                raise ConfigError(f"unknown builtin fixture {rest!r}")
            return FAMILIES[rest]()
        if scheme in ("table", "programs"):
            target = self.path(rest)
            if not target.is_file():
                raise ConfigError(f"fixture file {target} does not exist")
            return TableFamily.load(target) if scheme == "table" else ProgramFamily.load(target)
        raise ConfigError(f"fixture {key}={ref!r}: expected builtin:, table: or programs:")

    def optional_file(self, key: str) -> Optional[Path]:
        ref = self.fixtures.get(key)
        if ref is None:
            return None
        target = self.path(ref.split(":", 1)[-1])
        if not target.is_file():
            raise ConfigError(f"fixture file {target} does not exist")
        return target


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file {path} does not exist")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return scenario_from_config(cp, path.parent, default_name=path.stem)


def scenario_from_config(cp: configparser.ConfigParser, base: Path, default_name: str = "scenario") -> Scenario:
    if not cp.has_section("scenario") or not cp.has_option("scenario", "construction"):
        raise ConfigError("missing [scenario] construction")
    construction = cp.get("scenario", "construction").strip()
    if construction not in CONSTRUCTIONS:
        raise ConfigError(f"unknown construction {construction!r}; expected one of {sorted(CONSTRUCTIONS)}")
    if not cp.has_section("horizon"):
        raise ConfigError("missing [horizon] section")
    dims = {}
    for key in ("x_max", "e_max", "s_max"):
        raw = cp.get("horizon", key, fallback=None)
        if raw is None:
            raise ConfigError(f"missing horizon {key}")
        try:
            dims[key] = int(raw)
        except ValueError:
            raise ConfigError(f"horizon {key}={raw!r} is not an integer") from None
    horizon = Horizon(**dims)
    out = cp.get("output", "dir", fallback=None)
    sc = Scenario(
        construction=construction,
        horizon=horizon,
        name=cp.get("scenario", "name", fallback=default_name),
        fixtures=dict(cp.items("fixtures")) if cp.has_section("fixtures") else {},
        knobs=dict(cp.items("knobs")) if cp.has_section("knobs") else {},
        output=None if out is None else (Path(out) if Path(out).is_absolute() else base / out),
        base=base,
    )
    # parse every fixture now so a broken reference fails before any work
    for key, ref in sc.fixtures.items():
        if ref.startswith(("builtin:", "table:", "programs:")):
            sc.family(key)
        else:
            sc.optional_file(key)
    return sc


# -- constructions ------------------------------------------------------------

Artifacts = Dict[str, str]


def _text(lines) -> str:
    return "\n".join(lines) + ("\n" if lines else "")


def _path_approx(sc: Scenario, psi: StagePartialMap) -> PathApprox:
    f = sc.optional_file("path")
    if f is not None:
        return PathApprox.load(f)
    members = sc.knob_ints("members", (0, 3))
    settle = sc.knob_int("settle", 20, 0, sc.horizon.s_max)
    return fx.settling_path(psi, members, sc.horizon, settle)


def _limit_approx(sc: Scenario, key: str, default_members=()) -> LimitApprox:
    f = sc.optional_file(key)
    if f is not None:
        return LimitApprox.load(f)
    kind = sc.knobs.get(key, "settle").strip()
    if kind in ("const0", "const1"):
        return LimitApprox.constant(int(kind[-1]))
    if kind != "settle":
        raise ConfigError(f"knob {key}={kind!r}; expected const0, const1 or settle")
    return fx.stabilizing_set(sc.knob_ints("members", default_members), sc.knob_int("settle", 10, 0))


def run_scramble(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    psi = sc.family("psi", "builtin:fix1")
    mode = Mode(sc.knob_choice("mode", "pi2", {"pi2", "sigma2"}))
    res = scramble(psi, _path_approx(sc, psi), mode, sc.horizon)
    rows = [f"{r} {word(res.row_string[r])} {res.row_index[r]}" for r in sorted(res.row_string)]
    return {"theta.txt": _text(res.theta.to_lines()), "rows.txt": _text(rows)}, res.trace


def run_dependent(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    psi = sc.family("psi", "builtin:fix1")
    preds = dependent_predicates(psi, sc.horizon)
    phi = preds[sc.knob_choice("phi", "increasing-total", preds)]
    res = scramble_dependent(psi, phi, sc.horizon)
    return {"theta.txt": _text(res.theta.to_lines()),
            "chosen.txt": " ".join(map(str, res.chosen)) + "\n"}, res.trace


def run_dominate(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    fam = sc.family("family", "builtin:fix1")
    g = dominate_family(fam, canonical_witness(fam, sc.horizon), sc.horizon)
    trace = ConstructionTrace()
    for x, v in enumerate(g):
        trace.emit(v, "bound", x=x, g=v)
    return {"g.txt": _text([f"{x} {v}" for x, v in enumerate(g)])}, trace


def run_generic_scenario(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    fam = sc.family("family", "builtin:fix1")
    st = GenericState.from_family(fam, sc.horizon)
    n_targets = sc.knob_int("targets", len(st.targets), 0, len(st.targets))
    st = GenericState(targets=st.targets[:n_targets])
    stages = sc.knob_int("stages", 8, 0)
    st, verdicts = run_generic(st, stages, sc.horizon, sc.knob_int("l_search", 6, 1), sc.knob_int("v_max", 10, 1))
    trace = ConstructionTrace()
    lines = []
    for v, sigma in zip(verdicts, st.history[1:]):
        trace.emit(v.stage, "extend", branch=v.branch, length=v.length, sigma=",".join(map(str, sigma)))
        lines.append(f"{v.stage} {v.branch} {v.length} {','.join(map(str, sigma))}")
    return {"generic.txt": _text(lines)}, trace


def run_high(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    name = sc.knob_choice("predicate", "mod3-blocked", fx.PI2_PREDICATES)
    psi = fx.PI2_PREDICATES[name]
    h = sc.horizon
    g = search_dominator(psi, h)
    trace = ConstructionTrace()
    lines = []
    for x in range(h.x_max):
        w = high_witness(psi, lambda y: g[y], x, h)
        verdict = "holds" if w else "fails"
        trace.emit(x, "decide", x=x, verdict=verdict)
        lines.append(f"{x} {verdict}" + (f" {w[0]} {w[1]}" if w else ""))
    return {"high.txt": _text(lines)}, trace


def run_mad_extend(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    fam = sc.family("family", "builtin:dyadic")
    trace = ConstructionTrace()
    b = extend_mad(fam, _limit_approx(sc, "e_approx"), sc.horizon, sc.knob_int("b0", 0, 0), trace)
    return {"set.txt": _text(b.to_lines())}, trace


def run_mad_partition(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    fam = sc.family("family", "builtin:dyadic")
    chosen = build_partition(fam, sc.horizon)
    trace = ConstructionTrace()
    for k, e in enumerate(chosen):
        trace.emit(k, "choose", k=k, e=e)
    return {"indices.txt": " ".join(map(str, chosen)) + "\n"}, trace


def run_bsig2(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    a = sc.knob_int("a", 3, 1)
    trace = ConstructionTrace()
    part, psi = bsig2_partition(a, _limit_approx(sc, "b_approx", (0, 2)), sc.horizon, trace)
    return {"partition.txt": _text(part.to_lines()), "psi.txt": _text(psi.to_lines())}, trace


def run_dnr_ed(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    m = sc.family("machine", "builtin:sixteen")
    budget = sc.knob_int("budget", 10_000, 1)
    g = dnr_to_ed(fx.diagonal_dnr(m, budget), m, fx.sixteen_index_finder(m, budget), sc.horizon)
    trace = ConstructionTrace()
    for e, v in enumerate(g):
        trace.emit(e, "code", e=e, g=v)
    return {"g.txt": _text([f"{e} {v}" for e, v in enumerate(g)])}, trace


def run_med(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    fam = sc.family("family", "builtin:med4")
    st, trace = med_construct(fam, sc.knob_int("c", sc.horizon.e_max, 0, sc.horizon.e_max), sc.horizon)
    table = u_table(fam, sc.horizon)
    return {"med.txt": _text(st.to_lines()), "utable.txt": _text([f"{u} {e} {x}" for u, e, x in table])}, trace


def run_bi_scan(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    m = sc.family("machine", "builtin:fix1")
    oracle = bits(sc.knobs.get("oracle", ""))
    budget = sc.knob_int("f", 10, 0)
    build = ndf_to_bi(m, oracle, lambda y: budget, sc.horizon)
    trace = ConstructionTrace()
    for y, (b, t) in enumerate(zip(build.bits, build.treated)):
        if t is not None:
            trace.emit(y, "treat", y=y, e=t, bit=b)
    return {"bi.txt": build.text()}, trace


def run_forcing_scenario(sc: Scenario) -> Tuple[Artifacts, ConstructionTrace]:
    m = sc.family("machine", "builtin:mixed")
    names = [n.strip() for n in sc.knobs.get("targets", "evens, odds, ones").split(",") if n.strip()]
    for n in names:
        if n not in TARGET_SETS:
            raise ConfigError(f"unknown target set {n!r}; expected one of {sorted(TARGET_SETS)}")
    c = sc.knob_ints("c", tuple(range(1, len(names) + 1)))
    stages = sc.knob_int("stages", 2 * len(names), 0, 2 * len(names))
    bounds = ForcingBounds(sc.knob_int("max_len", 6, 1), sc.knob_int("budget", 50, 1))
    fs = ForcingSequence(targets=tuple(TARGET_SETS[n] for n in names), c=c)
    fs = run_forcing(fs, stages, m, bounds)
    trace = ConstructionTrace()
    for stage, (sigma, n) in enumerate(zip(fs.strings[1:], fs.counts[1:]), 1):
        trace.emit(stage, "extend", parity="odd" if stage % 2 else "even", sigma=word(sigma), count=n)
    return {"forcing.txt": _text(fs.to_lines())}, trace


CONSTRUCTIONS: Dict[str, Callable[[Scenario], Tuple[Artifacts, ConstructionTrace]]] = {
    "scramble": run_scramble,
    "dependent": run_dependent,
    "dominate": run_dominate,
    "generic": run_generic_scenario,
    "high": run_high,
    "mad-extend": run_mad_extend,
    "mad-partition": run_mad_partition,
    "bsig2": run_bsig2,
    "dnr-ed": run_dnr_ed,
    "med": run_med,
    "bi-scan": run_bi_scan,
    "forcing": run_forcing_scenario,
}


def run_scenario(sc: Scenario, out_dir=None) -> Tuple[Dict[str, Path], ConstructionTrace]:
    """Run the construction and write its artifacts plus ``trace.txt``; outputs depend only on the scenario."""
    artifacts, trace = CONSTRUCTIONS[sc.construction](sc)
    target = Path(out_dir) if out_dir is not None else sc.output
    written = {}
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)
        artifacts = dict(artifacts, **{"trace.txt": trace.text()})
        for name in sorted(artifacts):
            p = target / name
            p.write_text(artifacts[name])
            written[name] = p
    return written, trace


# -- verification -------------------------------------------------------------

@dataclass
class PropertyResult:
    name: str
    ok: bool
    witness: Optional[tuple] = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        out = f"{status} {self.name}"
        if self.detail:
            out += f" {self.detail}"
        if self.witness is not None:
            out += f" witness={self.witness}"
        return out


@dataclass
class VerificationReport:
    scenario: str
    seed: int
    results: List[PropertyResult] = field(default_factory=list)
    duration: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.ok]

    def text(self, timing: bool = True) -> str:
        lines = [f"scenario={self.scenario} seed={self.seed} properties={len(self.results)}"]
        lines += [r.line() for r in self.results]
        summary = f"result={'pass' if self.ok else 'fail'}"
        if timing:
            summary += f" seconds={self.duration:.3f}"
        lines.append(summary)
        return "\n".join(lines) + "\n"


@dataclass
class Context:
    sc: Scenario
    seed: int
    rng: random.Random


Property = Callable[[Context], PropertyResult]
PROPERTIES: Dict[str, Property] = {}


def prop(name: str):
    def register(fn):
        PROPERTIES[name] = lambda ctx: fn(ctx, name)
        return fn
    return register


def _families_for(ctx: Context) -> List[StagePartialMap]:
    out = [fx.fix1(), fx.sixteen_machine()]
    for key, ref in ctx.sc.fixtures.items():
        if ref.startswith(("builtin:", "table:", "programs:")):
            out.append(ctx.sc.family(key))
    return out


@prop("core.monotone")
def _monotone(ctx, name):
    samples = ctx.sc.knob_int("samples", 1000, 1)
    for fam in _families_for(ctx):
        rows = max(1, min(fam.row_count, 40))
        for _ in range(samples):
            e, x = ctx.rng.randrange(rows), ctx.rng.randrange(64)
            s = ctx.rng.randrange(300)
            s2 = s + ctx.rng.randrange(1, 300)
            a, b = eval_bounded(fam, e, x, s), eval_bounded(fam, e, x, s2)
            if isinstance(a, Converged) and a != b:
                return PropertyResult(name, False, (fam.identifier, e, x, s, s2), f"{a} then {b}")
    return PropertyResult(name, True, detail=f"samples={samples}")


@prop("core.value-bound")
def _value_bound(ctx, name):
    for fam in _families_for(ctx):
        rows = max(1, min(fam.row_count, 40))
        for _ in range(ctx.sc.knob_int("samples", 1000, 1)):
            e, x, s = ctx.rng.randrange(rows), ctx.rng.randrange(64), ctx.rng.randrange(300)
            v = value_at(fam, e, x, s)
            if v is not None and v >= s:
                return PropertyResult(name, False, (fam.identifier, e, x, s, v))
    return PropertyResult(name, True)


@prop("core.oracle-extension")
def _oracle_extension(ctx, name):
    machines = [fx.om1()] + list(fx.forcing_machines().values())
    for m in machines:
        for e in range(m.row_count):
            for x in range(4):
                for n in range(4):
                    for sigma in product((0, 1), repeat=n):
                        state, use = oracle_eval(m, sigma, e, x, 60)
                        if not isinstance(state, Converged):
                            continue
                        for k in range(1, max(use + 3 - n, 0) + 1):
                            for tail in product((0, 1), repeat=k):
                                again = oracle_eval(m, sigma + tail, e, x, 60)
                                if again != (state, use):
                                    return PropertyResult(name, False, (m.identifier, e, x, word(sigma + tail)))
    return PropertyResult(name, True)


@prop("approx.rt-prefix-closed")
def _rt_prefix(ctx, name):
    for mask in range(256):
        out = rt_strings(lambda b: bool(mask >> b & 1), 8)
        for sigma in out:
            if sigma[:-1] not in out:
                return PropertyResult(name, False, (mask, word(sigma)))
    return PropertyResult(name, True, detail="masks=256 length=8")


@prop("approx.settling-change")
def _settling_change(ctx, name):
    h = Horizon(8, 1, 64)
    approxes = [fx.la1(), LimitApprox.constant(1)]
    for _ in range(50):
        marks = {x: ctx.rng.randrange(h.s_max - 1) for x in range(h.x_max)}
        approxes.append(LimitApprox(lambda x, s, m=marks: int(s >= m[x])))
    for a in approxes:
        for x in range(h.x_max):
            try:
                s = settling_time(a, x, h)
            except NotSettled:
                continue
            if s > 0 and a(x, s - 1) == a(x, s):
                return PropertyResult(name, False, (a.identifier, x, s))
    return PropertyResult(name, True)


@prop("approx.complement-in-rt")
def _complement_rt(ctx, name):
    h = Horizon(10, 1, 40)
    for _ in range(100):
        final = {x for x in range(h.x_max) if ctx.rng.random() < 0.5}
        a = LimitApprox.settling(final, lambda x, f=ctx.rng.randrange(h.s_max - 1): f)
        members = {x for x in range(h.x_max) if a(x, h.s_max - 1)}
        alpha = complement_string(members, h.x_max)
        if alpha not in rt_strings(lambda b: b in members, h.x_max):
            return PropertyResult(name, False, (sorted(final),))
    return PropertyResult(name, True)


def _scramble_case(ctx) -> Tuple[StagePartialMap, Horizon, PathApprox, Mode]:
    sc = ctx.sc
    if sc.construction == "scramble":
        psi = sc.family("psi", "builtin:fix1")
        return psi, sc.horizon, _path_approx(sc, psi), Mode(sc.knob_choice("mode", "pi2", {"pi2", "sigma2"}))
    psi, h = fx.fix1(), Horizon(32, 4, 1000)
    return psi, h, fx.settling_path(psi, (0, 3), h, 20), Mode.PI2


def expected_graphs(psi: StagePartialMap, alpha, mode: Mode, h: Horizon):
    """Graphs of the total rows the final string selects."""
    return {row_graph(psi, e, h) for e, b in enumerate(alpha) if b == mode.bit and e < h.e_max} - {None}


@prop("scrambler.graph-preservation")
def _graph_preservation(ctx, name):
    psi, h, p, mode = _scramble_case(ctx)
    res = scramble(psi, p, mode, h)
    theta = res.theta
    f = ctx.sc.optional_file("theta")
    if f is not None:
        theta = TableFamily.load(f)
    matches = 0
    for r, x, _t, v in theta.entries():
        e = res.row_index.get(r)
        if e is None:
            return PropertyResult(name, False, (r, x, None, v), "row never assigned")
        want = value_at(psi, e, x, h.s_max)
        if want is not None and want != v:
            return PropertyResult(name, False, (r, x, want, v))
        matches += 1
    table = " ".join(f"{r}->{res.row_index[r]}" for r in sorted(res.row_index))
    return PropertyResult(name, True, detail=f"entries={matches} rows: {table}")


@prop("scrambler.equivalence")
def _equivalence(ctx, name):
    psi, h, p, mode = _scramble_case(ctx)
    res = scramble(psi, p, mode, h)
    got = res.total_graphs(h)
    want = expected_graphs(psi, p(h.s_max - 1), mode, h)
    if got != want:
        extra = sorted(got - want)
        missing = sorted(want - got)
        return PropertyResult(name, False, (extra[:1], missing[:1]), f"extra={len(extra)} missing={len(missing)}")
    return PropertyResult(name, True, detail=f"graphs={len(got)}")


@prop("scrambler.stability")
def _stability(ctx, name):
    psi, h, p, mode = _scramble_case(ctx)
    res = scramble(psi, p, mode, h)
    final = p(h.s_max - 1)
    last_change = max((s for s in range(1, h.s_max) if p(s) != p(s - 1)), default=0)
    for ev in res.trace.of_kind("abandon"):
        tau = bits(ev["string"])
        if ev.stage >= 2 * last_change and final[:len(tau)] == tau:
            return PropertyResult(name, False, (ev.stage, ev["string"]))
    return PropertyResult(name, True)


@prop("scrambler.decode-roundtrip")
def _roundtrip(ctx, name):
    count = 0
    for n in range(11):
        for sigma in product((0, 1), repeat=n):
            count += 1
            t = decode_indices(sigma)
            if decode_indices(encode_indices(t)) != t:
                return PropertyResult(name, False, (word(sigma),))
            closed = sigma[:max((i + 1 for i, b in enumerate(sigma) if b == 0), default=0)]
            if encode_indices(t) != closed:
                return PropertyResult(name, False, (word(sigma), word(encode_indices(t))))
    return PropertyResult(name, True, detail=f"strings={count}")


@prop("scrambler.tree-prefix-closed")
def _tree_prefix(ctx, name):
    h = Horizon(6, 4, 10)
    psi = fx.fix1()
    for key, phi in dependent_predicates(psi, h).items():
        if key == "only-2":
            continue  # not closed under prefixes of index tuples
        tree = dependent_tree(phi, h, 8)
        for sigma in tree:
            if sigma and sigma[:-1] not in tree:
                return PropertyResult(name, False, (key, word(sigma)))
    return PropertyResult(name, True)


@prop("domination.dominates")
def _dominates(ctx, name):
    fam = fx.fix1()
    h = Horizon(32, 4, 1000)
    g = dominate_family(fam, canonical_witness(fam, h), h)
    for e in range(h.e_max):
        graph = row_graph(fam, e, h)
        if graph is None:
            continue
        for x in range(e + 1, h.x_max):
            if g[x] <= graph[x]:
                return PropertyResult(name, False, (e, x, graph[x], g[x]))
    g0 = dominate_family(fx.empty_family(), canonical_witness(fx.empty_family(), h), h)
    if g0 != [x + 1 for x in range(h.x_max)]:
        return PropertyResult(name, False, ("empty", g0[:4]))
    return PropertyResult(name, True)


def brute_pi2(psi, x: int, h: Horizon) -> bool:
    return all(any(psi(x, y, z) for z in range(h.s_max)) for y in range(h.x_max))


@prop("domination.high-agrees")
def _high(ctx, name):
    h = Horizon(16, 1, 200)
    for key, psi in fx.PI2_PREDICATES.items():
        g = search_dominator(psi, h)
        for x in range(h.x_max):
            if high_decide(psi, lambda y: g[y], x, h) != brute_pi2(psi, x, h):
                return PropertyResult(name, False, (key, x))
    return PropertyResult(name, True)


@prop("domination.generic")
def _generic(ctx, name):
    targets = (lambda x: 1, lambda x: x % 3, lambda x: 2 + x % 2)
    h = Horizon(40, 1, 1)
    st, verdicts = run_generic(GenericState(targets=targets), 8, h)
    sigma, hist = st.sigma, st.history
    for i, g in enumerate(targets):
        start = len(hist[i + 1])
        for x in range(start, len(sigma)):
            if sigma[x] < g(x):
                return PropertyResult(name, False, (i, x, g(x), sigma[x]))
    return PropertyResult(name, True, detail=f"length={len(sigma)}")


@prop("mad.increasing")
def _mad_increasing(ctx, name):
    h = Horizon(128, 6, 256)
    b = extend_mad(fx.dyadic(6, 256), LimitApprox.constant(1), h)
    if any(a >= c for a, c in zip(b.elements, b.elements[1:])) or list(b.stages) != sorted(b.stages):
        return PropertyResult(name, False, (b.elements, b.stages))
    return PropertyResult(name, True, detail=f"elements={len(b)}")


@prop("mad.almost-disjoint")
def _mad_ad(ctx, name):
    h = Horizon(256, 6, 512)
    fam = fx.dyadic(6, 512)
    for settle in (0, 5, 17):
        approx = fx.stabilizing_set(range(6), settle, before=0)
        b = extend_mad(fam, approx, h)
        for e in range(6):
            hits = sum(1 for x in b.elements if value_at(fam, e, x, h.s_max) == 1)
            if hits > settle + e + 2:
                return PropertyResult(name, False, (settle, e, hits))
    return PropertyResult(name, True)


@prop("mad.psi-monotone")
def _psi_monotone(ctx, name):
    h = Horizon(64, 5, 128)
    fam = fx.dyadic(5, 128)
    for n in range(4):
        for t in product(range(5), repeat=n):
            if check_psi(t, fam, h):
                for k in range(n):
                    if not check_psi(t[:k], fam, h):
                        return PropertyResult(name, False, (t, k))
    return PropertyResult(name, True)


@prop("mad.partition")
def _bsig2(ctx, name):
    h = Horizon(64, 3, 64)
    settle = 10
    part, psi = bsig2_partition(3, fx.stabilizing_set((0, 2), settle), h)
    if any(b is None for b in part.block[settle:]):
        return PropertyResult(name, False, ("uncovered", part.block.index(None)))
    for i in range(3):
        unbounded = any(part.block[x] == i for x in range(h.x_max - 3, h.x_max))
        if unbounded != (i in (0, 2)):
            return PropertyResult(name, False, (i, unbounded))
        if i == 1 and any(x >= settle for x in part.members(i)):
            return PropertyResult(name, False, (i, max(part.members(i))))
    return PropertyResult(name, True)


@prop("med.utable-injective")
def _utable(ctx, name):
    h = Horizon(32, 4, 128)
    fam = fx.med4()
    table = u_table(fam, h)
    keys = [(u, e, x) for u, e, x in table]
    if keys != sorted(set(keys)):
        return PropertyResult(name, False, ("unsorted",))
    for u, e, x in table:
        if any(value_at(fam, e, y, u) is None for y in range(x)) or (
                u > 0 and all(value_at(fam, e, y, u - 1) is not None for y in range(x))):
            return PropertyResult(name, False, (u, e, x))
    return PropertyResult(name, True, detail=f"entries={len(table)}")


def _med_run(ctx):
    if ctx.sc.construction == "med":
        fam = ctx.sc.family("family", "builtin:med4")
        return med_construct(fam, ctx.sc.knob_int("c", ctx.sc.horizon.e_max), ctx.sc.horizon)
    return med_construct(fx.med4(), 4, Horizon(64, 4, 256))


@prop("med.pairwise-distinct")
def _med_distinct(ctx, name):
    _st, trace = _med_run(ctx)
    clash = replay_pairwise_distinct(trace)
    if clash is not None:
        return PropertyResult(name, False, clash)
    return PropertyResult(name, True, detail=f"stages={len(trace)}")


@prop("med.fresh-unique")
def _med_fresh(ctx, name):
    st, trace = _med_run(ctx)
    fresh = [ev["value"] for ev in trace.of_kind("define") if ev["origin"] == "fresh"]
    others = {ev["value"] for ev in trace.of_kind("define") if ev["origin"] != "fresh"}
    if len(set(fresh)) != len(fresh) or set(fresh) & others:
        return PropertyResult(name, False, (sorted(set(fresh) & others)[:1],))
    return PropertyResult(name, True, detail=f"fresh={len(fresh)}")


@prop("med.factorization")
def _factorization(ctx, name):
    from sympy import multiplicity
    m = fx.sixteen_machine()
    budget = 10_000
    f = fx.diagonal_dnr(m, budget)
    finder = fx.sixteen_index_finder(m, budget)
    g = dnr_to_ed(f, m, finder, Horizon(16, 16, budget))
    for e, v in enumerate(g):
        for j, i in enumerate(finder(e)):
            if multiplicity(nth_prime(j), v) != f(i):
                return PropertyResult(name, False, (e, j, f(i)))
        for j in range(e + 1):
            if value_at(m, j, e, budget) == v:
                return PropertyResult(name, False, (e, j, v))
    return PropertyResult(name, True)


def _bi_cases():
    h = Horizon(40, 1, 1)
    evens = TableFamily(((0, x, 2, int(x % 2 == 0)) for x in range(64)), identifier="evens-fast")
    yield "evens-fast", evens, (), (lambda y: 10), h
    yield "fix1", fx.fix1(), (), (lambda y: y + 3), h
    yield "om1", fx.om1(), (1, 0, 1, 1, 0, 0, 1, 0) * 5, (lambda y: 2 * y + 4), h
    yield "sixteen", fx.sixteen_machine(), (), (lambda y: 50 + y * y), h
    yield "never", fx.empty_family(), (), (lambda y: 100), h


@prop("bi.treatment")
def _bi_treatment(ctx, name):
    for key, m, oracle, f, h in _bi_cases():
        build = ndf_to_bi(m, oracle, f, h)
        for y, (b, e) in enumerate(zip(build.bits, build.treated)):
            if e is None:
                continue
            state, _ = oracle_eval(m, oracle, e, y, f(y))
            if not isinstance(state, Converged) or state.value == b or e >= y:
                return PropertyResult(name, False, (key, y, e, b))
    return PropertyResult(name, True)


@prop("bi.deterministic")
def _bi_det(ctx, name):
    for key, m, oracle, f, h in _bi_cases():
        if ndf_to_bi(m, oracle, f, h).text() != ndf_to_bi(m, oracle, f, h).text():
            return PropertyResult(name, False, (key,))
    return PropertyResult(name, True)


def brute_max_jump(family, sigma, c, max_len, budget) -> int:
    best = None
    for n in range(len(sigma) + 1, max_len + 1):
        for tail in product((0, 1), repeat=n - len(sigma)):
            k = jump_count(family, sigma + tail, c, budget)
            best = k if best is None else max(best, k)
    return best


@prop("bi.even-maximal")
def _even_max(ctx, name):
    for key, m in fx.forcing_machines().items():
        for max_len in range(2, 7):
            for c in range(m.row_count + 1):
                fs = ForcingSequence(targets=(TARGET_SETS["ones"],), c=(c,), strings=((), (0,)), counts=(None, 0))
                _sigma, got = harrington_extend(fs, 2, m, ForcingBounds(max_len, 60))
                want = brute_max_jump(m, (0,), c, max_len, 60)
                if got != want:
                    return PropertyResult(name, False, (key, max_len, c, got, want))
    return PropertyResult(name, True)


@prop("bi.strict-extension")
def _strict(ctx, name):
    fs = ForcingSequence(targets=tuple(TARGET_SETS[n] for n in ("evens", "ones", "squares")), c=(1, 2, 3))
    fs = run_forcing(fs, 6, fx.forcing_machines()["mixed"], ForcingBounds(8, 60))
    for a, b in zip(fs.strings, fs.strings[1:]):
        if len(b) <= len(a) or b[:len(a)] != a:
            return PropertyResult(name, False, (word(a), word(b)))
    return PropertyResult(name, True)


def select(suite: Optional[str]) -> List[str]:
    """Properties by exact name, by module prefix (``mad`` or ``mad.``), or all."""
    if suite in (None, "", "all"):
        return sorted(PROPERTIES)
    if suite in PROPERTIES:
        return [suite]
    prefix = suite.rstrip(".") + "."
    names = sorted(n for n in PROPERTIES if n.startswith(prefix))
    if not names:
        raise ConfigError(f"no property or suite named {suite!r}")
    return names


DEFAULT_SEED = 20240611


def verify(sc: Scenario, suite: Optional[str] = None, seed: int = DEFAULT_SEED, out_dir=None) -> VerificationReport:
    names = select(suite)
    report = VerificationReport(sc.name, seed)
    start = time.perf_counter()
    for n in names:
        ctx = Context(sc, seed, random.Random(f"{seed}:{n}"))
        report.results.append(PROPERTIES[n](ctx))
    report.duration = time.perf_counter() - start
    target = Path(out_dir) if out_dir is not None else sc.output
    if target is not None:
        target.mkdir(parents=True, exist_ok=True)
        (target / "report.txt").write_text(report.text())
    return report
