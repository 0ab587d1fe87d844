from .config import ConfigError, RunConfig, dump_config, load_config, parse_config
from .io import load_fringe_csv, write_curve_csv, write_fringe_csv
from .main import run

__all__ = ["ConfigError", "RunConfig", "dump_config", "load_config", "load_fringe_csv", "parse_config", "run",
           "write_curve_csv", "write_fringe_csv"]
