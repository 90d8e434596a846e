"""Experiment configuration, dispatch and the growth table.

A run is described by an ExperimentConfig: a mode, a flat map of typed
parameters, a seed, a workload budget and an output format.  ``run`` turns
it into records and an exit code:

    0  success
    1  configuration or input-domain error
    2  some assertable bound or identity failed
    3  workload budget exceeded
"""

from __future__ import annotations

import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import approx, budget, charsums, forms, records, sieve
from .errors import (
    BoundViolation,
    ConfigError,
    OracleMismatch,
    SparsityLabError,
    WorkloadExceeded,
)

EXIT_OK, EXIT_CONFIG, EXIT_BOUND, EXIT_WORKLOAD = 0, 1, 2, 3


# --- typed parameters --------------------------------------------------------


def _int(text: str) -> int:
    return int(text)


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(x) for x in text.split(",")) if text else ()


def _number(text: str) -> Fraction | complex:
    """Rational when possible (exact search), complex otherwise."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace("i", "j"))


def _numbers(text: str) -> tuple:
    return tuple(_number(x) for x in text.split(","))


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes"):
        return True
    if low in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


@dataclass(frozen=True)
class Param:
    parse: Callable[[str], Any]
    default: Any = None
    required: bool = False


_FORM = {"c": Param(_ints, required=True), "g": Param(_int, required=True)}
_SIEVE = {
    "z": Param(float, required=True),
    "alpha": Param(float, sieve.DEFAULT_ALPHA),
    "c1": Param(float, sieve.DEFAULT_C1),
}

SCHEMAS: dict[str, dict[str, Param]] = {
    "sieve": {"g": Param(_int, required=True), **_SIEVE},
    "count-squares": {
        **_FORM,
        "K": Param(_int, required=True),
        "method": Param(_choice("mitm", "brute"), "mitm"),
        "include_zero": Param(_bool, False),
    },
    "count-sparse": {
        "g": Param(_int, required=True),
        "m": Param(_int, required=True),
        "K": Param(_int, required=True),
    },
    "char-sum": {
        "kind": Param(
            _choice("quad", "twisted", "single", "product", "incomplete", "korobov", "t-count"),
            required=True,
        ),
        "q": Param(_int),
        "d": Param(_int),
        "a": Param(_ints),
        "chi": Param(_ints),
        "ell": Param(_int),
        "r": Param(_int),
        "theta": Param(_int),
        "b": Param(_ints),
        "L": Param(_ints),
        "denominator": Param(_choice("ell", "t"), "ell"),
        "c": Param(_ints),
        "g": Param(_int),
        "K": Param(_int),
    },
    "verify-lemma": {
        "lemma": Param(str, required=True),
        "q": Param(_int),
        "d": Param(_int),
        "a": Param(_ints),
        "m": Param(_int),
        "samples": Param(_int),
        "chi": Param(_ints),
        "ell": Param(_int),
        "r": Param(_int),
        "theta": Param(_int),
        "b": Param(_ints),
        "L": Param(_ints),
        "c": Param(_ints),
        "g": Param(_int),
        "K": Param(_int),
        "z": Param(float),
        "alpha": Param(float),
        "c1": Param(float),
        "slack": Param(float),
    },
    "approx-search": {
        "q": Param(_numbers, required=True),
        "lam": Param(_number, required=True),
        "c": Param(_numbers, required=True),
        "B": Param(_number, Fraction(0)),
        "N": Param(_int, required=True),
        "k_lo": Param(_int, 0),
        "k_hi": Param(_int),
    },
    "example-21": {
        "n": Param(_int, required=True),
        "precision_bits": Param(_int, 512),
    },
    "sieve-stats": {**_FORM, "K": Param(_int, required=True), **_SIEVE},
    "growth-table": {**_FORM, "N_grid": Param(_ints, ())},
}

MODES = tuple(SCHEMAS)
_JSONL_MODES = ("verify-lemma", "example-21")
GLOBAL_KEYS = ("mode", "seed", "budget", "format")


@dataclass
class ExperimentConfig:
    mode: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    workload_budget: int = budget.DEFAULT_BUDGET
    fmt: str | None = None
    out: Path | None = None

    @property
    def output_format(self) -> str:
        return self.fmt or ("jsonl" if self.mode in _JSONL_MODES else "csv")

    def resolved(self) -> dict:
        """Everything that determines the output; the output path is excluded."""
        return {
            "mode": self.mode,
            "params": dict(sorted(self.params.items())),
            "seed": self.seed,
            "budget": self.workload_budget,
            "format": self.output_format,
        }


def parse_pairs(tokens: list[str], origin: str) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{origin}: malformed entry {tok!r}, expected key=value")
        out[key] = value.strip()
    return out


def read_config_file(path: Path) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return parse_pairs(lines, str(path))


def build_config(
    mode: str | None,
    raw: dict[str, str],
    seed: int | None = None,
    workload_budget: int | None = None,
    fmt: str | None = None,
    out: Path | None = None,
) -> ExperimentConfig:
    raw = dict(raw)
    file_mode = raw.pop("mode", None)
    mode = mode or file_mode
    if mode is None:
        raise ConfigError("no mode given")
    if file_mode is not None and file_mode != mode:
        raise ConfigError(f"mode {mode!r} conflicts with config file mode {file_mode!r}")
    if mode not in SCHEMAS:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    try:
        # command-line values win over the config file
        file_seed = int(raw.pop("seed")) if "seed" in raw else None
        file_budget = int(raw.pop("budget")) if "budget" in raw else None
        file_fmt = raw.pop("format", None)
    except ValueError as exc:
        raise ConfigError(f"bad global setting: {exc}") from None
    seed = file_seed if seed is None else seed
    workload_budget = file_budget if workload_budget is None else workload_budget
    fmt = file_fmt if fmt is None else fmt
    if fmt not in (None, "csv", "jsonl"):
        raise ConfigError(f"format must be csv or jsonl, got {fmt!r}")
    schema = SCHEMAS[mode]
    params: dict[str, Any] = {}
    for key, text in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for mode {mode}")
        try:
            params[key] = schema[key].parse(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for key {key!r}: {exc}") from None
    for key, spec in schema.items():
        if key not in params:
            if spec.required:
                raise ConfigError(f"missing required key {key!r} for mode {mode}")
            if spec.default is not None:
                params[key] = spec.default
    if workload_budget is not None and workload_budget < 1:
        raise ConfigError("budget must be positive")
    return ExperimentConfig(
        mode=mode,
        params=params,
        seed=0 if seed is None else seed,
        workload_budget=budget.DEFAULT_BUDGET if workload_budget is None else workload_budget,
        fmt=fmt,
        out=out,
    )


# --- results -----------------------------------------------------------------


@dataclass
class RunResult:
    columns: list[str]
    rows: list[dict]
    failed: bool = False
    # count modes emit one summary record instead of per-row records as JSON lines
    summary: dict | None = None


def _need(p: dict, *keys: str, allowed: tuple[str, ...] = (), what: str = "") -> None:
    missing = [k for k in keys if k not in p]
    if missing:
        raise ConfigError(f"{what} needs key(s) {', '.join(missing)}")
    extra = sorted(set(p) - set(keys) - set(allowed))
    if extra:
        raise ConfigError(f"key(s) {', '.join(extra)} not used by {what}")


def _real_or_abs(x) -> float | int:
    if isinstance(x, complex):
        return abs(x)
    return x


def _complex_row(name: str, value) -> dict:
    v = complex(value)
    return {"quantity": name, "re": int(v.real) if isinstance(value, int) else v.real, "im": v.imag}


# --- growth table --------------------------------------------------------------


@dataclass(frozen=True)
class GrowthRow:
    N: int
    count: int
    log_m: float
    log_m_gamma: float | None
    ratio_m: float
    ratio_gamma: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


GROWTH_COLUMNS = ["N", "count", "log_m", "log_m_gamma", "ratio_m", "ratio_gamma"]


def growth_table(
    form: forms.SparseForm, N_grid: list[int], budget_limit: int | None = None
) -> list[GrowthRow]:
    """Representable-n counts against (log N)^m and (log N)^(m - gamma_m).

    The comparison columns are for inspection only; gamma_m exists for m >= 3,
    so the second pair of columns is empty for m <= 2.
    """
    if list(N_grid) != sorted(N_grid):
        raise ConfigError("N_grid must be ascending")
    m = form.m
    gamma = float(forms.gamma_m(m)) if m >= 3 else None
    rows = []
    for N in N_grid:
        if N < 2:
            raise ConfigError("grid values must be >= 2")
        count, _ = forms.count_representable_n(form, N, budget_limit=budget_limit)
        lg = math.log(N)
        log_m = lg**m
        log_g = lg ** (m - gamma) if gamma is not None else None
        rows.append(
            GrowthRow(N, count, log_m, log_g, count / log_m, count / log_g if log_g else None)
        )
    return rows


# --- mode handlers -------------------------------------------------------------


def _run_sieve(p: dict, cfg: ExperimentConfig) -> RunResult:
    L = sieve.build_sieve_set(p["g"], p["z"], p["alpha"], p["c1"])
    rows = [
        {"ell": s.ell, "tau": s.tau, "p_largest": s.p_largest, "nu2": s.nu2, "u0": L.u0}
        for s in L.primes
    ]
    return RunResult(["ell", "tau", "p_largest", "nu2", "u0"], rows, bool(sieve.membership_failures(L)))


def _run_count_squares(p: dict, cfg: ExperimentConfig) -> RunResult:
    form = forms.SparseForm(p["g"], p["c"])
    _, hits = forms.count_square_tuples(form, p["K"], p["method"], p["include_zero"])
    cols = ["n", "n_squared"] + [f"k_{i + 1}" for i in range(form.m)]
    rows = []
    for h in sorted(hits, key=lambda h: (h.root, h.k)):
        row = {"n": h.root, "n_squared": h.value}
        row.update({f"k_{i + 1}": k for i, k in enumerate(h.k)})
        rows.append(row)
    return RunResult(cols, rows, summary={**dict(sorted(p.items())), "count": len(rows)})


def _run_count_sparse(p: dict, cfg: ExperimentConfig) -> RunResult:
    squares = forms.sparse_squares(p["g"], p["m"], p["K"])
    rows = [
        {"n": math.isqrt(s), "n_squared": s, "nonzero_digits": forms.nonzero_digits(s, p["g"])}
        for s in squares
    ]
    return RunResult(["n", "n_squared", "nonzero_digits"], rows, summary={**dict(sorted(p.items())), "count": len(rows)})


_CHAR_KEYS = {
    "quad": (("q", "d", "a"), ()),
    "twisted": (("q", "d", "a", "chi"), ()),
    "single": (("ell", "theta", "a"), ("b",)),
    "product": (("ell", "r", "theta", "a"), ("b",)),
    "incomplete": (("ell", "r", "theta", "a", "L"), ()),
    "korobov": (("ell", "theta", "a"), ("denominator",)),
    "t-count": (("c", "g", "K", "ell"), ()),
}


def _run_char_sum(p: dict, cfg: ExperimentConfig) -> RunResult:
    kind = p.pop("kind")
    if kind != "korobov":
        p.pop("denominator", None)
    need, allowed = _CHAR_KEYS[kind]
    _need(p, *need, allowed=allowed, what=f"char-sum kind={kind}")
    cols = ["quantity", "re", "im"]
    if kind == "quad":
        return RunResult(cols, [_complex_row("S", charsums.quad_diag_sum(p["q"], p["d"], p["a"]))])
    if kind == "twisted":
        return RunResult(cols, [_complex_row("S", charsums.twisted_diag_sum(p["q"], p["d"], p["a"], p["chi"]))])
    if kind == "korobov":
        if len(p["a"]) != 1:
            raise ConfigError("korobov takes a single coefficient a")
        v = charsums.korobov_sum(p["a"][0], p["theta"], p["ell"], p["denominator"])
        return RunResult(cols, [_complex_row("S", v)])
    if kind == "t-count":
        form = forms.SparseForm(p["g"], p["c"])
        count = charsums.t_m_count(form, p["K"], p["ell"])
        return RunResult(cols, [_complex_row("T", count), _complex_row("trivial_bound", charsums.trivial_t_bound(form, p["K"], p["ell"]))])
    spec = charsums.CharSumSpec(p["ell"], p["theta"], p["a"], p.get("b"), p.get("r"))
    if kind == "single":
        return RunResult(cols, [_complex_row("S_ell", charsums.s_ell(spec))])
    if kind == "product":
        S, Sl, Sr = charsums.product_sum(spec)
        return RunResult(cols, [_complex_row("S", S), _complex_row("S_ell", Sl), _complex_row("S_r", Sr)])
    value, bound = charsums.incomplete_sum(spec, p["L"])
    return RunResult(cols, [_complex_row("S", value), _complex_row("reference_bound", bound)])


# verify-lemma: canonical names, with the numbered aliases the interface accepts
LEMMA_ALIASES = {
    "4.1": "diag-bound",
    "4.2": "twisted-bound",
    "4.3": "product-formula",
    "4.4": "single-bound",
    "4.5": "product-bound",
    "4.6": "incomplete-bound",
    "A.1": "korobov",
    "A.2": "sieve-count",
    "6.1": "trivial-count",
}
LEMMAS = (
    "diag-bound",
    "twisted-bound",
    "product-formula",
    "single-bound",
    "product-bound",
    "incomplete-bound",
    "korobov",
    "sieve-count",
    "trivial-count",
)


def _record(lemma: str, params: dict, value, bound, passed: bool) -> dict:
    ratio = None
    if isinstance(bound, (int, float)) and bound != 0 and isinstance(value, (int, float)):
        ratio = value / bound
    return {
        "lemma": lemma,
        "params": dict(sorted(params.items())),
        "value": value,
        "bound": bound,
        "ratio": ratio,
        "pass": bool(passed),
    }


def _coefficient_vectors(p: dict, seed: int, q: int) -> list[tuple[int, ...]]:
    if "a" in p:
        return [p["a"]]
    rng = random.Random(seed)
    return [tuple(rng.randrange(1, q) for _ in range(p["m"])) for _ in range(p.get("samples", 20))]


def _verify(lemma: str, p: dict, cfg: ExperimentConfig) -> list[dict]:
    slack = p.pop("slack", charsums.DEFAULT_SLACK)
    if lemma == "diag-bound":
        _need(p, "q", "d", allowed=("a", "m", "samples"), what=lemma)
        if "a" not in p and "m" not in p:
            raise ConfigError("diag-bound needs a or m")
        out = []
        for a in _coefficient_vectors(p, cfg.seed, p["q"]):
            S = charsums.quad_diag_sum(p["q"], p["d"], a, check=False)
            bound = charsums.diag_sum_bound(p["q"], p["d"], len(a))
            out.append(_record(lemma, {"q": p["q"], "d": p["d"], "a": a}, abs(S), bound, abs(S) <= bound + 1e-9))
        return out
    if lemma == "twisted-bound":
        _need(p, "q", "d", "a", "chi", what=lemma)
        S = charsums.twisted_diag_sum(p["q"], p["d"], p["a"], p["chi"])
        bound = slack * charsums.twisted_sum_bound(p["q"], p["d"], len(p["a"]))
        return [_record(lemma, {**p, "slack": slack}, abs(S), bound, abs(S) <= bound)]
    if lemma in ("product-formula", "single-bound", "product-bound"):
        two = lemma != "single-bound"
        _need(p, "ell", "theta", "a", *(("r",) if two else ()), allowed=("b",), what=lemma)
        spec = charsums.CharSumSpec(p["ell"], p["theta"], p["a"], p.get("b"), p.get("r"))
        if lemma == "product-formula":
            chk = charsums.product_sum_check(spec)
            exact = not any(spec.b)
            ok = chk.exact_match if exact else chk.abs_error <= charsums.COMPLEX_TOL
            prod = chk.S_ell * chk.S_r
            return [_record(lemma, p, _real_or_abs(chk.S), _real_or_abs(prod), ok)]
        if lemma == "single-bound":
            v = abs(charsums.s_ell(spec))
            bound = charsums.single_sum_bound(spec, slack)
        else:
            v = abs(charsums.product_sum(spec)[0])
            bound = charsums.product_sum_bound(spec, slack)
        return [_record(lemma, {**p, "slack": slack}, v, bound, v <= bound)]
    if lemma == "incomplete-bound":
        _need(p, "ell", "r", "theta", "a", "L", what=lemma)
        spec = charsums.CharSumSpec(p["ell"], p["theta"], p["a"], None, p["r"])
        value, ref = charsums.incomplete_sum(spec, p["L"])
        return [_record(lemma, {**p, "slack": slack}, abs(value), slack * ref, abs(value) <= slack * ref)]
    if lemma == "korobov":
        _need(p, "ell", "theta", allowed=("a",), what=lemma)
        ell = p["ell"]
        avals = p["a"] if "a" in p else tuple(range(1, ell))
        out = []
        for a in avals:
            v = abs(charsums.korobov_sum(a, p["theta"], ell, check=False))
            out.append(_record(lemma, {"a": a, "ell": ell, "theta": p["theta"]}, v, math.sqrt(ell), v <= math.sqrt(ell) + charsums.COMPLEX_TOL))
        return out
    if lemma == "trivial-count":
        _need(p, "c", "g", "K", "ell", what=lemma)
        form = forms.SparseForm(p["g"], p["c"])
        count = forms.count_congruence_solutions(form, p["K"], p["ell"])
        bound = charsums.trivial_t_bound(form, p["K"], p["ell"])
        return [_record(lemma, p, count, bound, count <= bound + 1e-9)]
    if lemma == "sieve-count":
        _need(p, "c", "g", "K", "ell", "z", allowed=("alpha", "c1"), what=lemma)
        form = forms.SparseForm(p["g"], p["c"])
        count = forms.count_congruence_solutions(form, p["K"], p["ell"])
        alpha = p.get("alpha", sieve.DEFAULT_ALPHA)
        bound = slack * charsums.sieve_count_bound(form.m, p["K"], p["z"], alpha)
        return [_record(lemma, {**p, "slack": slack}, count, bound, count <= bound)]
    raise ConfigError(f"unknown lemma {lemma!r}; expected one of {', '.join(LEMMAS)}")


def _run_verify(p: dict, cfg: ExperimentConfig) -> RunResult:
    name = p.pop("lemma")
    lemma = LEMMA_ALIASES.get(name, name)
    rows = _verify(lemma, p, cfg)
    cols = ["lemma", "params", "value", "bound", "ratio", "pass"]
    return RunResult(cols, rows, not all(r["pass"] for r in rows))


def _run_approx(p: dict, cfg: ExperimentConfig) -> RunResult:
    inst = approx.ApproxInstance(p["q"], p["lam"], p["c"], p["B"])
    reps = approx.search_representations(inst, p["N"], p["k_lo"], p.get("k_hi"))
    cols = ["n"] + [f"k_{i + 1}" for i in range(inst.m)] + ["residual"]
    rows = []
    for r in reps:
        row = {"n": r.n}
        row.update({f"k_{i + 1}": k for i, k in enumerate(r.k)})
        row["residual"] = r.residual
        rows.append(row)
    return RunResult(cols, rows)


def _run_example21(p: dict, cfg: ExperimentConfig) -> RunResult:
    rep = approx.lacunary_verify(p["n"], p["precision_bits"])
    row = rep.as_record()
    return RunResult(list(row), [row], not rep.passed)


def _run_sieve_stats(p: dict, cfg: ExperimentConfig) -> RunResult:
    form = forms.SparseForm(p["g"], p["c"])
    L = sieve.build_sieve_set(form.g, p["z"], p["alpha"], p["c1"])
    stats = charsums.sieve_statistics(form, p["K"], L)
    row = stats.as_dict()
    return RunResult(list(row), [row])


def _run_growth(p: dict, cfg: ExperimentConfig) -> RunResult:
    form = forms.SparseForm(p["g"], p["c"])
    rows = [r.as_dict() for r in growth_table(form, list(p["N_grid"]))]
    return RunResult(GROWTH_COLUMNS, rows)


HANDLERS: dict[str, Callable[[dict, ExperimentConfig], RunResult]] = {
    "sieve": _run_sieve,
    "count-squares": _run_count_squares,
    "count-sparse": _run_count_sparse,
    "char-sum": _run_char_sum,
    "verify-lemma": _run_verify,
    "approx-search": _run_approx,
    "example-21": _run_example21,
    "sieve-stats": _run_sieve_stats,
    "growth-table": _run_growth,
}


def execute(cfg: ExperimentConfig) -> RunResult:
    """Run the mode under the config's budget; exceptions propagate."""
    with budget.budget_scope(cfg.workload_budget):
        return HANDLERS[cfg.mode](dict(cfg.params), cfg)


def render(cfg: ExperimentConfig, result: RunResult) -> str:
    conf = cfg.resolved()
    if cfg.output_format == "csv":
        return records.render_csv(result.columns, result.rows, conf)
    rows = [result.summary] if result.summary is not None else result.rows
    return records.render_jsonl(rows, conf)


def run(cfg: ExperimentConfig, stderr=None) -> int:
    stderr = stderr or sys.stderr
    try:
        result = execute(cfg)
    except WorkloadExceeded as exc:
        print(f"workload exceeded: {exc}", file=stderr)
        return EXIT_WORKLOAD
    except (BoundViolation, OracleMismatch) as exc:
        print(f"bound failure: {exc}", file=stderr)
        return EXIT_BOUND
    except (ConfigError, SparsityLabError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    text = render(cfg, result)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if result.failed:
        print("bound failure: at least one record did not pass", file=stderr)
        return EXIT_BOUND
    return EXIT_OK
