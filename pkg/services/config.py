# services/config.py
# -----------------------------------------------------------------------------
# Purpose:
#   Load config.yaml, overlaid on a complete set of defaults so missing files
#   or keys never crash. FIBCFG_ORDER (environment or .env) overrides
#   series.order; CLI flags override both.
# -----------------------------------------------------------------------------

from __future__ import annotations

import copy
import os
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import find_dotenv, load_dotenv

ROOT = Path(__file__).resolve().parents[1]
CFG_PATH = ROOT / "config.yaml"
ORDER_ENV = "FIBCFG_ORDER"

DEFAULTS: Dict[str, Any] = {
    "series": {"order": 30, "z_range": 5},
    "enumeration": {
        "finite_cap": 32,
        "partition_cap": 45,
        "census_cap": 28,
        "brute_order": 12,
        "window_margin": 0,
    },
    "suite": {
        "checks": [
            "finite",
            "jacobi",
            "durfee-l0",
            "l1-explicit",
            "zslice",
            "final-theta-zero",
            "split",
            "left-limit",
            "durfee",
            "correspondence",
            "line-equivalence",
            "p-limit",
            "rogers-ramanujan",
            "voa-audit",
        ],
        "l_max": 3,
        "s_range": 3,
        "n_max": 3,
        "m_max": 3,
        "slice_range": 5,
        "left_limit_order": 15,
        "left_limit_l_max": 2,
        "voa_modules": [[0, 1], [0, 2], [1, 2], [0, 3], [1, 3], [2, 3]],
        "voa_order": 12,
        "workers": 1,
        "perturb": None,
    },
    "render": {"cell": 20, "margin": 20},
}


def load_config(cfg_path: Path | str | None = None) -> Dict[str, Any]:
    """Return defaults overlaid with the YAML file (shallow merge per section) and the environment."""
    cfg = copy.deepcopy(DEFAULTS)
    path = Path(cfg_path) if cfg_path is not None else CFG_PATH
    if path.exists():
        with path.open("r", encoding="utf-8") as f:
            user_cfg = yaml.safe_load(f) or {}
        if not isinstance(user_cfg, dict):
            raise ValueError(f"{path}: top level must be a mapping, got {type(user_cfg).__name__}")
        for k, v in user_cfg.items():
            if isinstance(v, dict) and isinstance(cfg.get(k), dict):
                cfg[k].update(v)
            else:
                cfg[k] = v

    env_file = find_dotenv(usecwd=True)
    if env_file:
        load_dotenv(env_file, override=False)
    raw = os.getenv(ORDER_ENV)
    if raw:
        try:
            cfg["series"]["order"] = int(raw)
        except ValueError as exc:
            raise ValueError(f"{ORDER_ENV} must be an integer, got {raw!r}") from exc
    return cfg
