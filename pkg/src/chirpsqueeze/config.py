"""Run configuration: JSON schema, defaults, canonical hash, factories.

A run is fully described by one JSON object; unknown keys are rejected so
typos fail loudly.  The canonical hash is the sha256 of the normalized
(default-filled, sorted, minimally separated) JSON and is embedded in every
output file, letting ``compare`` refuse to diff runs with different
effective settings.
"""

from __future__ import annotations

import hashlib
import json
import math

from .dispersion import DispersionModel, FrequencyGrid
from .errors import ConfigError
from .poling import PolingProfile, PumpCoupling

_TOP_KEYS = {"dispersion", "profile", "pump", "grid", "solver", "design", "mu_study"}
_DISPERSION_MODES = {"quadratic", "sellmeier"}
_PROFILE_KINDS = {"linear", "quadratic_hyperbolic", "table"}
_PUMP_KEYS = ("nu", "nu0", "gamma_abs")
_METHODS = {"DOP853", "RK45", "RK23", "Radau", "BDF", "LSODA"}

GRID_DEFAULTS = {"n": 1024, "span": 0.55}
SOLVER_DEFAULTS = {"rtol": 1e-10, "atol": 1e-12, "method": "DOP853", "mu": 1.0}
MU_STUDY_DEFAULTS = {
    "nu_values": [0.5 + 0.1 * i for i in range(16)],
    "mu_values": [0.0, 1.0],
}


def _require_dict(obj, name):
    if not isinstance(obj, dict):
        raise ConfigError(f"'{name}' must be a JSON object")
    return obj


def _num(section, key, val, minimum=None, maximum=None,
         exclusive: bool = False) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number")
    v = float(val)
    if not math.isfinite(v):
        raise ConfigError(f"{section}.{key} must be finite")
    if minimum is not None and (v <= minimum if exclusive else v < minimum):
        cmp = ">" if exclusive else ">="
        raise ConfigError(f"{section}.{key} must be {cmp} {minimum}")
    if maximum is not None and (v >= maximum if exclusive else v > maximum):
        cmp = "<" if exclusive else "<="
        raise ConfigError(f"{section}.{key} must be {cmp} {maximum}")
    return v


def _int(section, key, val, minimum) -> int:
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{section}.{key} must be an integer")
    if val < minimum:
        raise ConfigError(f"{section}.{key} must be >= {minimum}")
    return val


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return _require_dict(cfg, "config")


def normalize_config(cfg: dict) -> dict:
    """Validated, default-filled copy of a raw config dict."""
    cfg = _require_dict(cfg, "config")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}

    disp = dict(_require_dict(cfg.get("dispersion", {}), "dispersion"))
    mode = disp.pop("mode", "quadratic")
    if mode not in _DISPERSION_MODES:
        raise ConfigError(f"dispersion.mode must be one of {sorted(_DISPERSION_MODES)}")
    nd = {
        "mode": mode,
        "pump_wavelength_um": _num("dispersion", "pump_wavelength_um",
                                   disp.pop("pump_wavelength_um", 0.532),
                                   minimum=0.0, exclusive=True),
        "temperature_c": _num("dispersion", "temperature_c",
                              disp.pop("temperature_c", 24.5)),
    }
    if mode == "quadratic":
        nd["alpha"] = _num("dispersion", "alpha", disp.pop("alpha", 735.0))
        nd["beta"] = _num("dispersion", "beta", disp.pop("beta", 901.0))
    if disp:
        raise ConfigError(f"unknown dispersion keys: {sorted(disp)}")
    out["dispersion"] = nd

    if "profile" in cfg:
        prof = dict(_require_dict(cfg["profile"], "profile"))
        kind = prof.pop("kind", None)
        if kind not in _PROFILE_KINDS:
            raise ConfigError(f"profile.kind must be one of {sorted(_PROFILE_KINDS)}")
        np_ = {"kind": kind,
               "length_mm": _num("profile", "length_mm",
                                 prof.pop("length_mm", None),
                                 minimum=0.0, exclusive=True)}
        if kind == "linear":
            np_["K0"] = _num("profile", "K0", prof.pop("K0", None),
                             minimum=0.0, exclusive=True)
            np_["zeta"] = _num("profile", "zeta", prof.pop("zeta", None))
            if np_["zeta"] == 0.0:
                raise ConfigError("profile.zeta must be nonzero")
        elif kind == "quadratic_hyperbolic":
            np_["x_start"] = _num("profile", "x_start", prof.pop("x_start", None),
                                  minimum=0.0, maximum=1.0, exclusive=True)
            np_["x_end"] = _num("profile", "x_end", prof.pop("x_end", None),
                                minimum=0.0, maximum=1.0, exclusive=True)
        else:
            z = prof.pop("z_mm", None)
            K = prof.pop("K_rad_per_mm", None)
            if not (isinstance(z, list) and isinstance(K, list)) or len(z) != len(K):
                raise ConfigError("table profile needs matching z_mm and "
                                  "K_rad_per_mm lists")
            np_["z_mm"] = [_num("profile", "z_mm[]", v) for v in z]
            np_["K_rad_per_mm"] = [_num("profile", "K_rad_per_mm[]", v) for v in K]
        if prof:
            raise ConfigError(f"unknown profile keys: {sorted(prof)}")
        out["profile"] = np_

    if "pump" in cfg:
        pump = dict(_require_dict(cfg["pump"], "pump"))
        given = [k for k in _PUMP_KEYS if k in pump]
        if len(given) != 1:
            raise ConfigError("pump needs exactly one of nu, nu0, gamma_abs "
                              f"(got {given or 'none'})")
        npu = {given[0]: _num("pump", given[0], pump.pop(given[0]), minimum=0.0)}
        phi0 = pump.pop("phi0", None)
        npu["phi0"] = None if phi0 is None else _num("pump", "phi0", phi0)
        if pump:
            raise ConfigError(f"unknown pump keys: {sorted(pump)}")
        out["pump"] = npu

    grid = dict(_require_dict(cfg.get("grid", {}), "grid"))
    ng = {"n": _int("grid", "n", grid.pop("n", GRID_DEFAULTS["n"]), 64),
          "span": _num("grid", "span", grid.pop("span", GRID_DEFAULTS["span"]),
                       minimum=0.0, maximum=1.0, exclusive=True)}
    if grid:
        raise ConfigError(f"unknown grid keys: {sorted(grid)}")
    out["grid"] = ng

    sol = dict(_require_dict(cfg.get("solver", {}), "solver"))
    ns = {"rtol": _num("solver", "rtol", sol.pop("rtol", SOLVER_DEFAULTS["rtol"]),
                       minimum=0.0, exclusive=True),
          "atol": _num("solver", "atol", sol.pop("atol", SOLVER_DEFAULTS["atol"]),
                       minimum=0.0, exclusive=True),
          "method": sol.pop("method", SOLVER_DEFAULTS["method"]),
          "mu": _num("solver", "mu", sol.pop("mu", SOLVER_DEFAULTS["mu"]),
                     minimum=0.0)}
    if ns["method"] not in _METHODS:
        raise ConfigError(f"solver.method must be one of {sorted(_METHODS)}")
    if sol:
        raise ConfigError(f"unknown solver keys: {sorted(sol)}")
    out["solver"] = ns

    if "design" in cfg:
        des = dict(_require_dict(cfg["design"], "design"))
        ndes = {"length_mm": _num("design", "length_mm",
                                  des.pop("length_mm", None),
                                  minimum=0.0, exclusive=True)}
        has_band = "band" in des
        has_law = "delay_slope_fs" in des or "delay_offset_fs" in des
        if has_band == has_law:
            raise ConfigError("design needs either band or the delay-law pair "
                              "delay_slope_fs/delay_offset_fs")
        if has_band:
            band = des.pop("band")
            if not isinstance(band, list) or len(band) != 2:
                raise ConfigError("design.band must be [x_start, x_end]")
            ndes["band"] = [_num("design", "band[]", v, minimum=-1.0,
                                 maximum=1.0, exclusive=True) for v in band]
        else:
            ndes["delay_slope_fs"] = _num("design", "delay_slope_fs",
                                          des.pop("delay_slope_fs", None))
            ndes["delay_offset_fs"] = _num("design", "delay_offset_fs",
                                           des.pop("delay_offset_fs", None))
        if des:
            raise ConfigError(f"unknown design keys: {sorted(des)}")
        out["design"] = ndes

    ms = dict(_require_dict(cfg.get("mu_study", {}), "mu_study"))
    nms = {}
    for key in ("nu_values", "mu_values"):
        vals = ms.pop(key, MU_STUDY_DEFAULTS[key])
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"mu_study.{key} must be a nonempty list")
        nms[key] = [_num("mu_study", key + "[]", v, minimum=0.0) for v in vals]
    if ms:
        raise ConfigError(f"unknown mu_study keys: {sorted(ms)}")
    out["mu_study"] = nms
    return out


def canonical_json(norm: dict) -> str:
    return json.dumps(norm, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def config_hash(norm: dict) -> str:
    return hashlib.sha256(canonical_json(norm).encode("ascii")).hexdigest()


# ---- factories ----

def build_dispersion(norm: dict) -> DispersionModel:
    d = norm["dispersion"]
    if d["mode"] == "quadratic":
        return DispersionModel(mode="quadratic",
                               pump_wavelength_um=d["pump_wavelength_um"],
                               temperature_c=d["temperature_c"],
                               alpha=d["alpha"], beta=d["beta"])
    return DispersionModel(mode="sellmeier",
                           pump_wavelength_um=d["pump_wavelength_um"],
                           temperature_c=d["temperature_c"])


def build_profile(norm: dict, dispersion: DispersionModel) -> PolingProfile:
    if "profile" not in norm:
        raise ConfigError("this run needs a profile section")
    p = norm["profile"]
    if p["kind"] == "linear":
        return PolingProfile.linear(p["K0"], p["zeta"], p["length_mm"])
    if p["kind"] == "quadratic_hyperbolic":
        if dispersion.mode == "quadratic":
            alpha, beta = dispersion.alpha, dispersion.beta
        else:
            alpha, beta = dispersion.quadratic_fit()
        return PolingProfile.quadratic_hyperbolic(alpha, beta, p["length_mm"],
                                                  p["x_start"], p["x_end"])
    return PolingProfile.from_table(p["z_mm"], p["K_rad_per_mm"],
                                    length_mm=p["length_mm"])


def build_coupling(norm: dict, profile: PolingProfile) -> PumpCoupling:
    if "pump" not in norm:
        raise ConfigError("this run needs a pump section")
    p = norm["pump"]
    phi0 = p["phi0"]
    if "nu" in p:
        return PumpCoupling.from_nu(p["nu"], profile, phi0)
    if "nu0" in p:
        return PumpCoupling.from_nu0(p["nu0"], profile, phi0)
    return PumpCoupling(p["gamma_abs"], phi0)


def build_grid(norm: dict) -> FrequencyGrid:
    g = norm["grid"]
    return FrequencyGrid.symmetric_grid(span=g["span"], n=g["n"])
