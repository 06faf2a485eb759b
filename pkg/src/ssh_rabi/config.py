"""Key-value parameter files for the command-line driver.

Format: one ``key = value`` per line, ``#`` starts a comment, blank lines
ignored. Keys unknown to the chosen command are rejected, so typos fail
loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .errors import ConfigError


@dataclass(frozen=True)
class Key:
    name: str
    type: Callable[[str], Any]
    default: Any
    help: str


def _choice(*options):
    def parse(text):
        value = text.strip().lower()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return value
    parse.__name__ = "choice"
    return parse


def _int_list(text):
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _optional_float(text):
    return None if text.strip().lower() in ("", "none") else float(text)


def _optional_path(text):
    return None if text.strip().lower() in ("", "none", "default") else text.strip()


CHAIN_KEYS = [
    Key("t0", float, 2.5, "hopping energy [eV]"),
    Key("alpha", float, 4.1, "electron-phonon coupling [eV/A]"),
    Key("K", float, 21.0, "spring constant [eV/A^2]"),
    Key("a", float, 1.22, "lattice constant [A]"),
    Key("N", int, 100, "number of lattice sites"),
]

SCHEMAS: dict[str, list[Key]] = {
    "band": CHAIN_KEYS + [
        Key("u", float, 0.05, "dimerization coordinate [A]"),
        Key("grid_size", int, 2048, "k points across the reduced zone"),
        Key("branch", _choice("upper", "ssh", "both"), "both", "quasiparticle branch"),
    ],
    "stability": CHAIN_KEYS + [
        Key("u", float, 0.05, "dimerization coordinate [A]"),
        Key("grid_size", int, 2048, "k points across the reduced zone"),
        Key("branch", _choice("upper", "ssh", "both"), "both", "quasiparticle branch"),
        Key("occupation", _choice("equilibrium", "inverted", "custom"), "equilibrium",
            "occupation profile; 'custom' uses n_c and n_v"),
        Key("n_c", float, 0.0, "conduction occupation (occupation = custom)"),
        Key("n_v", float, 1.0, "valence occupation (occupation = custom)"),
    ],
    "ground-state": CHAIN_KEYS + [
        Key("method_tolerance", float, 1e-8, "search tolerance relative to u_max"),
        Key("z_max", float, 0.9, "upper end of the search, z = 2 alpha u / t0"),
        Key("profile_points", int, 201, "points in the (u, E) well profile"),
        Key("profile_u_max", _optional_float, None, "profile extent [A] (default: search u_max)"),
    ],
    "rabi": [
        Key("n", int, 4, "number of chains"),
        Key("g", float, 1.0, "qubit-field coupling [rad/s]"),
        Key("l", int, 2, "photon-sector index"),
        Key("grid_size", int, 1024, "h grid points (even)"),
        Key("grid_extent", float, 20.48, "total width of the h grid [1/length]"),
        Key("theta", _choice("cosine", "linear"), "cosine", "dispersion profile"),
        Key("omega0", float, 0.0, "dispersion offset [rad/s]"),
        Key("hopping", float, 0.5, "intrachain hopping of the cosine profile [rad/s]"),
        Key("interchain", float, 0.2, "nearest-chain coupling [rad/s]"),
        Key("interchain_back", _optional_float, None,
            "coupling to the previous chain if different (non-reciprocal; rejected)"),
        Key("velocity", float, 1.0, "slope of the linear profile"),
        Key("kappa", _choice("constant", "cosine"), "cosine", "coupling profile"),
        Key("kappa0", float, 1.0, "mean coupling shape"),
        Key("kappa_modulation", float, 0.2, "cosine modulation of the coupling shape"),
        Key("kappa_interchain", float, 0.1, "coupling shape between neighbouring chains"),
        Key("envelope_center", float, 0.5, "centre of the Gaussian envelope in h"),
        Key("envelope_width", float, 0.2, "width of the Gaussian envelope in h"),
        Key("envelope_chains", _int_list, (0,), "chains carrying the initial packet"),
        Key("sample_rate", float, 4.0, "inversion sampling rate [Hz]"),
        Key("duration", float, 400.0, "simulated time [s]"),
        Key("peak_threshold", float, 0.05, "relative peak-detection threshold"),
    ],
    "spectra-check": [
        Key("fixture", _optional_path, None, "peak fixture file (default: shipped)"),
    ],
}

COMMANDS = tuple(SCHEMAS)


def defaults(command: str) -> dict[str, Any]:
    return {k.name: k.default for k in SCHEMAS[command]}


def parse_params(text: str, command: str, source: str = "<params>") -> dict[str, Any]:
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = {k.name: k for k in SCHEMAS[command]}
    values = defaults(command)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        name, value = (part.strip() for part in line.split("=", 1))
        if name not in schema:
            raise ConfigError(f"{source}:{lineno}: unknown key {name!r} for {command}")
        if name in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {name!r}")
        seen.add(name)
        try:
            values[name] = schema[name].type(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {name!r}: {exc}") from None
    return values


def load_params(path: str | Path | None, command: str) -> dict[str, Any]:
    if path is None:
        return defaults(command)
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"parameter file not found: {path}")
    return parse_params(path.read_text(encoding="utf-8"), command, source=str(path))


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def format_params(values: dict[str, Any], command: str) -> str:
    lines = [f"# {command} parameters"]
    for key in SCHEMAS[command]:
        lines.append(f"# {key.help}")
        lines.append(f"{key.name} = {_format(values[key.name])}")
    return "\n".join(lines) + "\n"
