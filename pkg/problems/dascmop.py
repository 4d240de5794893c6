"""
DASCMOP constrained benchmark suite (DASCMOP1-DASCMOP9) with tunable difficulty.

The difficulty triplet (eta, zeta, gamma) scales the three constraint types:
eta narrows the feasible strips in x (type I), zeta shrinks the feasible
distance band (type II) and gamma grows the infeasible ellipses or balls
around the front (type III).

True evaluation runs through pymoo. The objective and constraint formulas kept
here serve reference-front sampling only.
"""
import numpy as np
from pymoo.problems import get_problem as pymoo_problem
from problems.problem import DomainError, PymooSuiteProblem, stack_columns

PI = np.pi
DEFAULT_DIFFICULTY = (0.5, 0.5, 0.5)

# Type III centres for two objectives, rotated ellipses with a^2 = 0.3, b^2 = 1.2
ELLIPSE_P = np.array([0, 1, 0, 1, 2, 0, 1, 2, 3], dtype=float)
ELLIPSE_Q = np.array([1.5, 0.5, 2.5, 1.5, 0.5, 3.5, 2.5, 1.5, 0.5])
ELLIPSE_A2 = 0.3
ELLIPSE_B2 = 1.2
ELLIPSE_THETA = -0.25 * PI

# Type III ball centres for three objectives
BALLS = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1 / np.sqrt(3)] * 3])


class DASCMOPProblem(PymooSuiteProblem):
   front_lines = 4000
   front_steps = 400

   def __init__(self, n: int = 10, difficulty: tuple[float, float, float] = DEFAULT_DIFFICULTY):
      eta, zeta, gamma = (float(v) for v in difficulty)
      if not all(0.0 <= v <= 1.0 for v in (eta, zeta, gamma)):
         raise DomainError(f"difficulty factors must lie in [0, 1], got {difficulty}")
      self.eta, self.zeta, self.gamma = eta, zeta, gamma

      super().__init__(n)
      self.metadata["difficulty"] = [eta, zeta, gamma]

   def _backend(self):
      backend = pymoo_problem(self.name.lower(), (self.eta, self.zeta, self.gamma))
      # pymoo builds every instance with 30 variables; its distance terms read n_var
      backend.n_var = self.n
      backend.xl = np.zeros(self.n)
      backend.xu = np.ones(self.n)
      return backend

   @property
   def b(self) -> float:
      return 2 * self.eta - 1

   @property
   def d(self) -> float:
      return 0.5 if self.zeta != 0 else 0.0

   @property
   def e(self) -> float:
      return np.inf if self.zeta == 0 else self.d - np.log(self.zeta)

   @property
   def r(self) -> float:
      return 0.5 * self.gamma

   @property
   def p(self) -> int:
      return 11 if self.M == 2 else 7

   def _objectives(self, pos, g):
      raise NotImplementedError

   def _type_one(self, pos):
      cols = [self.b - np.sin(20 * PI * pos[..., 0])]
      if self.M == 3:
         cols.append(self.b - np.cos(20 * PI * pos[..., 1]))
      return cols

   def _type_three(self, F):
      if self.M == 2:
         dx = F[..., 0, None] - ELLIPSE_P
         dy = F[..., 1, None] - ELLIPSE_Q
         ct, st = np.cos(ELLIPSE_THETA), np.sin(ELLIPSE_THETA)
         form = (dx * ct - dy * st) ** 2 / ELLIPSE_A2 + (dx * st + dy * ct) ** 2 / ELLIPSE_B2
         return [self.r - form[..., k] for k in range(len(ELLIPSE_P))]

      return [self.r ** 2 - np.sum((F - centre) ** 2, axis=-1) for centre in BALLS]

   def _positions(self, size):
      if self.M == 2:
         return np.linspace(0, 1, max(4 * size, self.front_lines))[:, None]
      k = int(np.ceil(np.sqrt(4 * size)))
      a, b = np.meshgrid(np.linspace(0, 1, k), np.linspace(0, 1, k), indexing="ij")
      return np.column_stack([a.ravel(), b.ravel()])

   def _front_lines(self, size):
      # The distance value must stay inside the band [d, e]
      pos = self._positions(size)
      top = min(self.e, self.d + 1.5)
      g = np.linspace(self.d, top, self.front_steps)
      F = self._objectives(pos[:, None, :], g[None, :])

      strips = np.all(stack_columns(*self._type_one(pos)) <= 0, axis=-1)
      balls = np.all(stack_columns(*self._type_three(F)) <= 0, axis=-1)
      return F, strips[:, None] & balls


class _Convex(DASCMOPProblem):
   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(x1 + g, 1 - x1 ** 2 + g)


class _Concave(DASCMOPProblem):
   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(x1 + g, 1 - np.sqrt(x1) + g)


class _Disconnected(DASCMOPProblem):
   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(x1 + g, 1 - np.sqrt(x1) + 0.5 * np.abs(np.sin(5 * PI * x1)) + g)


class DASCMOP1(_Convex):
   pass


class DASCMOP2(_Concave):
   pass


class DASCMOP3(_Disconnected):
   pass


class DASCMOP4(_Convex):
   pass


class DASCMOP5(_Concave):
   pass


class DASCMOP6(_Disconnected):
   pass


class DASCMOP7(DASCMOPProblem):
   M = 3

   def _objectives(self, pos, g):
      x1, x2 = pos[..., 0], pos[..., 1]
      return stack_columns(x1 * x2 + g, x2 * (1 - x1) + g, 1 - x2 + g)


class _Spherical(DASCMOPProblem):
   M = 3

   def _objectives(self, pos, g):
      c1 = np.cos(0.5 * PI * pos[..., 0])
      return stack_columns(
         c1 * np.cos(0.5 * PI * pos[..., 1]) + g,
         c1 * np.sin(0.5 * PI * pos[..., 1]) + g,
         np.sin(0.5 * PI * pos[..., 0]) + g,
      )


class DASCMOP8(_Spherical):
   pass


class DASCMOP9(_Spherical):
   pass


DASCMOP_PROBLEMS = {cls.__name__: cls for cls in (
   DASCMOP1, DASCMOP2, DASCMOP3, DASCMOP4, DASCMOP5, DASCMOP6, DASCMOP7, DASCMOP8, DASCMOP9,
)}
