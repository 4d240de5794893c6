from dataclasses import dataclass, field, replace
from enum import Enum, auto


class SearchFlag(Enum):
   CONSTRAINED = auto()
   UNCONSTRAINED = auto()

   @property
   def label(self) -> str:
      return "Constrained" if self is SearchFlag.CONSTRAINED else "Unconstrained"


class Variant(Enum):
   PSCMOEA = "pscmoea"
   V1 = "v1"
   V2 = "v2"
   V3 = "v3"

   @classmethod
   def parse(cls, value: "str | Variant") -> "Variant":
      if isinstance(value, Variant):
         return value
      try:
         return cls(str(value).strip().lower())
      except ValueError:
         raise ValueError(f"Unknown variant: {value}") from None

   @property
   def switching_enabled(self) -> bool:
      return self is not Variant.V3

   @property
   def description(self) -> str:
      descriptions = {
         Variant.PSCMOEA: "PCD ranking with Kendall-tau search switching",
         Variant.V1: "lexicographic PoF-threshold ranking",
         Variant.V2: "PoF x probabilistic-dominance ranking",
         Variant.V3: "PCD ranking, switching disabled",
      }
      return descriptions[self]


@dataclass(frozen=True)
class KrigingConfig:
   starts: int = 5
   # Starts once a previous optimum seeds the search
   warm_starts: int = 1
   log10_theta_bounds: tuple[float, float] = (-3.0, 2.0)
   nugget: float = 1e-10
   max_nugget: float = 1e-4
   max_iter: int = 100
   prescreen_tolerance: float = 1e-4


@dataclass(frozen=True)
class SubEAConfig:
   population: int = 100
   generations: int = 100
   crossover_prob: float = 0.9
   mutation_prob: float = 0.1
   eta_c: float = 10.0
   eta_m: float = 20.0
   infeasible_ratio: float = 0.2
   duplicate_tolerance: float = 1e-4
   duplicate_retries: int = 100

   def __post_init__(self):
      for name in ("crossover_prob", "mutation_prob", "infeasible_ratio"):
         value = getattr(self, name)
         if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
      if self.eta_c <= 0 or self.eta_m <= 0:
         raise ValueError("distribution indices must be positive")
      if self.population < 2 or self.generations < 0:
         raise ValueError("population must be >= 2 and generations >= 0")


@dataclass(frozen=True)
class OptimizerConfig:
   """
   Main-loop settings. `initial_samples` of None means 11 * n - 1, and `rv_spacing`
   of None means 99 for two objectives and 12 for three.
   """
   max_evaluations: int = 500
   initial_samples: int | None = None
   tau_threshold: float = 0.27
   epsilon: float = 1e-4
   variant: Variant = Variant.PSCMOEA
   pof_threshold: float = 0.99
   rv_spacing: int | None = None
   subea: SubEAConfig = field(default_factory=SubEAConfig)
   kriging: KrigingConfig = field(default_factory=KrigingConfig)

   def initial_size(self, n: int) -> int:
      return self.initial_samples if self.initial_samples is not None else 11 * n - 1

   def spacing(self, M: int) -> int:
      if self.rv_spacing is not None:
         return self.rv_spacing
      return 99 if M == 2 else 12

   def validate(self, n: int) -> None:
      if self.initial_size(n) > self.max_evaluations:
         raise ValueError(f"initial sample {self.initial_size(n)} exceeds the budget {self.max_evaluations}")
      if self.initial_size(n) < 2:
         raise ValueError("at least two initial samples are needed to train the models")

   def with_variant(self, variant) -> "OptimizerConfig":
      return replace(self, variant=Variant.parse(variant))
