"""Scenario configuration files and shipped presets.

Format: blocks of ``key = value`` lines separated by blank lines; ``#``
starts a comment. Recognized keys:

``id``
    scenario name (default ``scenario<k>``)
``kind``
    one of the six test kinds
``n``
    sample size, or comma-separated group sizes for k-sample kinds
``p``
    dimension (optional for block independence when ``blocks`` is given)
``blocks``
    comma-separated block sizes for block independence
``alternative``
    ``identity``, ``diag_spike``, ``equicorrelated``, ``scaled_identity`` or
    ``banded``; for k-sample kinds one entry per group separated by ``;``
``alt_params``
    comma-separated ``name=value`` pairs, ``;`` between groups; a count of
    ``half`` means the integer part of ``p/2``
``iterations``, ``seed``, ``alpha``
    Monte Carlo settings (defaults 10000, 0, 0.05)

Example::

    id = table1-p30
    kind = sphericity
    n = 100
    p = 30
    alternative = diag_spike
    alt_params = value=1.69, count=half
"""

from __future__ import annotations

from importlib import resources

from .design import Shape, TestKind
from .errors import ConfigError, HdlrtError
from .sim import Banded, DiagSpike, Equicorrelated, Identity, ScaledIdentity, Scenario

PRESETS = ("table1", "table2", "table3", "table4", "table5", "table6")

_KEYS = {"id", "kind", "n", "p", "blocks", "alternative", "alt_params", "iterations", "seed",
         "alpha"}

_ALTERNATIVES = {
    "identity": (Identity, {}),
    "diag_spike": (DiagSpike, {"value": float, "count": "count"}),
    "equicorrelated": (Equicorrelated, {"a": float, "b": float, "shift": float}),
    "scaled_identity": (ScaledIdentity, {"c": float}),
    "banded": (Banded, {"diag": float, "off": float, "bandwidth": int, "shift": float,
                        "shift_count": "count"}),
}


def _ints(text: str, line: int, key: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError(f"line {line}: {key} must be comma-separated integers, got {text!r}") from None


def _alternative(name: str, params: str, line: int):
    name = name.strip().lower()
    if name not in _ALTERNATIVES:
        raise ConfigError(f"line {line}: unknown alternative {name!r}; expected one of "
                          + ", ".join(_ALTERNATIVES))
    cls, schema = _ALTERNATIVES[name]
    kwargs = {}
    for item in params.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"line {line}: alt_params entry {item!r} is not name=value")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in schema:
            raise ConfigError(f"line {line}: {name} has no parameter {key!r}")
        conv = schema[key]
        try:
            if conv == "count":
                kwargs[key] = None if value.lower() == "half" else int(value)
            else:
                kwargs[key] = conv(value)
        except ValueError:
            raise ConfigError(f"line {line}: bad value {value!r} for {key}") from None
    try:
        return cls(**kwargs)
    except TypeError:
        raise ConfigError(f"line {line}: {name} needs alt_params "
                          + ", ".join(f"{k}=..." for k in schema)) from None


def _kind_and_shape(entries: dict) -> tuple[TestKind, Shape]:
    first = min(line for line, _ in entries.values())

    def get(key, default=None):
        return entries[key][1] if key in entries else default

    def line_of(key):
        return entries[key][0] if key in entries else first

    if "kind" not in entries:
        raise ConfigError(f"line {first}: entry is missing 'kind'")
    try:
        kind = TestKind.parse(get("kind"))
    except HdlrtError as exc:
        raise ConfigError(f"line {line_of('kind')}: {exc}") from None
    if "n" not in entries:
        raise ConfigError(f"line {first}: entry is missing 'n'")
    sizes = _ints(get("n"), line_of("n"), "n")
    p = None
    if get("p") is not None:
        try:
            p = int(get("p"))
        except ValueError:
            raise ConfigError(f"line {line_of('p')}: p must be an integer, got {get('p')!r}") from None
    try:
        if kind is TestKind.BLOCK_INDEPENDENCE:
            if "blocks" not in entries:
                raise ConfigError(f"line {first}: block-independence needs 'blocks'")
            shape = Shape.blocks(sizes[0], _ints(get("blocks"), line_of("blocks"), "blocks"))
            if p is not None and p != shape.p:
                raise ConfigError(f"line {line_of('p')}: p={p} but blocks sum to {shape.p}")
        else:
            if p is None:
                raise ConfigError(f"line {first}: entry is missing 'p'")
            if kind.grouped:
                if len(sizes) < 2:
                    raise ConfigError(f"line {line_of('n')}: {kind.value} needs n1,n2,...")
                shape = Shape.groups(sizes, p)
            else:
                if len(sizes) != 1:
                    raise ConfigError(f"line {line_of('n')}: {kind.value} takes a single n")
                shape = Shape.single(sizes[0], p)
    except ConfigError:
        raise
    except HdlrtError as exc:
        raise ConfigError(f"line {first}: {exc}") from None
    return kind, shape


def _build(entries: dict, index: int) -> Scenario:
    first = min(line for line, _ in entries.values())

    def get(key, default=None):
        return entries[key][1] if key in entries else default

    def line_of(key):
        return entries[key][0] if key in entries else first

    kind, shape = _kind_and_shape(entries)

    k = shape.k if kind.grouped else 1
    names = [s.strip() for s in get("alternative", "identity").split(";")]
    params = [s.strip() for s in get("alt_params", "").split(";")]
    if len(names) == 1 and k > 1:
        names = names * k
    if len(params) == 1 and k > 1:
        params = params * k
    if len(names) != k or len(params) != k:
        raise ConfigError(f"line {line_of('alternative')}: expected {k} alternative "
                          f"entr{'y' if k == 1 else 'ies'} separated by ';'")
    alts = tuple(_alternative(nm, pa, line_of("alternative")) for nm, pa in zip(names, params))
    try:
        return Scenario(
            name=get("id", f"scenario{index + 1}"),
            kind=kind,
            shape=shape,
            alternative=alts,
            alpha=float(get("alpha", 0.05)),
            iterations=int(get("iterations", 10_000)),
            seed=int(get("seed", 0)),
        )
    except (HdlrtError, ValueError) as exc:
        raise ConfigError(f"line {first}: {exc}") from None


def parse_blocks(text: str, keys=frozenset(_KEYS)) -> list[dict]:
    """Split ``key = value`` text into blocks of ``{key: (line, value)}``."""
    blocks: list[dict] = []
    current: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if current:
                blocks.append(current)
                current = {}
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in keys:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        current[key] = (lineno, value)
    if current:
        blocks.append(current)
    if not blocks:
        raise ConfigError("configuration contains no entries")
    return blocks


def parse_scenarios(text: str) -> list[Scenario]:
    """Parse a scenario configuration.

    Raises
    ------
    ConfigError
        With the offending line number.
    """
    return [_build(b, i) for i, b in enumerate(parse_blocks(text))]


def parse_moment_queries(text: str) -> list[tuple[TestKind, Shape, tuple[float, ...]]]:
    """Parse moment-check entries: keys ``kind``, ``n``, ``p``, ``blocks``, ``t``.

    ``t`` is a comma-separated list of exponents.
    """
    out = []
    for entries in parse_blocks(text, frozenset({"kind", "n", "p", "blocks", "t"})):
        first = min(line for line, _ in entries.values())
        if "t" not in entries:
            raise ConfigError(f"line {first}: moment entry is missing 't'")
        line, raw = entries["t"]
        try:
            exps = tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"line {line}: t must be comma-separated numbers, got {raw!r}") from None
        kind, shape = _kind_and_shape(entries)
        out.append((kind, shape, exps))
    return out


def load_preset(name: str) -> list[Scenario]:
    """Scenarios of a shipped preset (``table1`` ... ``table6``)."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    text = resources.files("hdlrt").joinpath("presets").joinpath(f"{name}.cfg").read_text()
    return parse_scenarios(text)


def load_scenarios(source: str) -> list[Scenario]:
    """Preset name or path to a configuration file."""
    if source in PRESETS:
        return load_preset(source)
    try:
        with open(source, encoding="utf-8") as fh:
            return parse_scenarios(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {source!r}: {exc}") from None
