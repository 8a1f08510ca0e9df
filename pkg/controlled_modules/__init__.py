"""Controlled Modules - controlled cellular simplicial modules, their homotopy
theory, mapping telescopes and K_0 computations."""

__version__ = "0.1.0"

from .config import Config, get_config, reset_config
from .control import (
    FiniteSpace,
    MetricSpace,
    check_map,
    check_module,
    minimal_certificate,
    pushout_control,
    space_from_json,
)
from .exceptions import (
    AssertionFailure,
    AttachError,
    ConfigError,
    ControlledModulesError,
    ControlViolation,
    HomotopyError,
    K0Error,
    SchemaError,
    TelescopeError,
    UnresolvedReferenceError,
    WitnessError,
    WorkbenchError,
)
from .k0 import AbelianGroupNF, k0, k0_split, relative_groups
from .logging_config import get_logger, setup_logging
from .modules import CellularModule, Element, ModuleMap, pushout, quotient
from .rings import ring_from_json
from .telescope import interval, split_idempotent, telescope
from .workbench import export, load, run_scenario, validate

__all__ = [
    # Config
    "Config",
    "get_config",
    "reset_config",
    # Modules
    "CellularModule",
    "Element",
    "ModuleMap",
    "pushout",
    "quotient",
    "ring_from_json",
    # Control
    "MetricSpace",
    "FiniteSpace",
    "space_from_json",
    "check_module",
    "check_map",
    "minimal_certificate",
    "pushout_control",
    # Telescopes
    "interval",
    "telescope",
    "split_idempotent",
    # K-theory
    "AbelianGroupNF",
    "k0",
    "k0_split",
    "relative_groups",
    # Workbench
    "run_scenario",
    "validate",
    "export",
    "load",
    # Exceptions
    "ControlledModulesError",
    "ConfigError",
    "AttachError",
    "ControlViolation",
    "HomotopyError",
    "WitnessError",
    "TelescopeError",
    "K0Error",
    "WorkbenchError",
    "SchemaError",
    "UnresolvedReferenceError",
    "AssertionFailure",
    # Logging
    "setup_logging",
    "get_logger",
]
