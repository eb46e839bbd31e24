"""Plain records of an experiment run. Nothing here is persisted."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .exceptions import LatticeError
from .potentials import PotentialFamily


@dataclass
class ExperimentConfig:
    family: PotentialFamily
    experiment: str
    grids: Dict[str, List[float]] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    output_dir: Optional[Path] = None
    seed: int = 0

    def __str__(self):
        fam = self.family
        return f'{self.experiment} (k1={fam.k1:g}, k2={fam.k2:g}, K={fam.K})'

    def echo(self):
        """JSON-ready copy of the validated config."""
        return {
            'family': {'k1': self.family.k1, 'k2': self.family.k2,
                       'K': self.family.K},
            'experiment': self.experiment,
            'grids': {key: list(values) for key, values in self.grids.items()},
            'tolerances': dict(self.tolerances),
            'output_dir': None if self.output_dir is None
            else str(self.output_dir),
            'seed': self.seed,
        }


@dataclass
class Table:
    name: str
    header: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)

    @property
    def filename(self):
        return f'{self.name}.csv'


@dataclass
class RunResult:
    config: ExperimentConfig
    tables: List[Table] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    paths: List[Path] = field(default_factory=list)
    failure: Optional[LatticeError] = None

    def table(self, name):
        for table in self.tables:
            if table.name == name:
                return table
        raise KeyError(name)
