""" run configuration: argparse flags layered over an optional YAML file """

import json
import math
import os.path as osp
from dataclasses import dataclass, field, fields, asdict

import yaml

from .errors import FixtureError

ROOT = osp.dirname(osp.dirname(osp.abspath(__file__)))
FIXTURES = osp.join(ROOT, 'fixtures')

SYSTEMS = ("general", "equator", "pole")
COMMANDS = ("verify", "tables", "reduce", "integrate", "residual")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    system: str = "general"
    omega: object = "symbolic"
    g: object = "symbolic"
    out: str = None
    fixtures: str = FIXTURES
    tol: float = 1e-9
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    advection: str = "corrected"
    search: bool = True
    figure: str = None
    ic: list = None
    span: list = None
    step: float = None
    spacings: list = field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3])
    logdir: str = None
    workers: int = 4

    def __post_init__(self):
        self.omega = parse_param(self.omega, "omega")
        self.g = parse_param(self.g, "g")
        self.validate()

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError("unknown command {}".format(self.command))
        if self.system not in SYSTEMS:
            raise UsageError("unknown system {!r}, expected one of {}".format(self.system, ", ".join(SYSTEMS)))
        if self.advection not in ("corrected", "literal"):
            raise UsageError("unknown advection reading {}".format(self.advection))
        for name in ("tol", "rel_tol", "abs_tol"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise UsageError("{} must be a positive number".format(name))
        if self.step is not None and not self.step > 0:
            raise UsageError("step must be positive")
        if any(not d > 0 for d in self.spacings):
            raise UsageError("spacings must be positive")

    def bindings(self):
        """ numeric parameter bindings, symbolic ones left out """
        out = {}
        if self.omega != "symbolic":
            out["Omega"] = self.omega
        if self.g != "symbolic":
            out["g"] = self.g
        return out

    def to_json(self):
        return asdict(self)


def parse_param(val, name):
    if val is None or val == "symbolic":
        return "symbolic"
    try:
        val = float(val)
    except (TypeError, ValueError):
        raise UsageError("{} must be a number or 'symbolic', got {!r}".format(name, val))
    if not math.isfinite(val):
        raise UsageError("{} must be finite".format(name))
    return val


def load_yaml(path):
    with open(path) as fp:
        data = yaml.safe_load(fp) or {}
    if not isinstance(data, dict):
        raise UsageError("config file {} must hold a mapping".format(path))
    return data


def from_args(args):
    """ RunConfig from parsed arguments; flags given on the command line win over the file """
    known = {f.name for f in fields(RunConfig)}
    values = {}
    if getattr(args, "config", None):
        for k, v in load_yaml(args.config).items():
            if k not in known:
                raise UsageError("unknown config key {}".format(k))
            values[k] = v

    for k, v in vars(args).items():
        if k in known and v is not None:
            values[k] = v
    return RunConfig(**values)


def load_fixture(name, directory=FIXTURES):
    path = osp.join(directory, name if name.endswith(".json") else name + ".json")
    if not osp.isfile(path):
        raise FixtureError(path)
    try:
        with open(path) as fp:
            return json.load(fp)
    except json.JSONDecodeError as e:
        raise FixtureError(path, "malformed JSON: {}".format(e))
