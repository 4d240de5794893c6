"""
MW constrained benchmark suite (MW1-MW14).

True evaluation runs through pymoo, including its variable boxes (MW6 spans
[0, 1.1], MW11 [0, sqrt(2)], MW13 and MW14 [0, 1.5]). The objective formulas
below are written as functions of a unit position and the distance value g and
only serve reference-front sampling. Constraints depend on the objective vector
only.
"""
import numpy as np
from pymoo.problems import get_problem as pymoo_problem
from problems.problem import PymooSuiteProblem, stack_columns

PI = np.pi


class MWProblem(PymooSuiteProblem):
   # Range of g scanned above its optimum when sampling the front
   g_span = 1.5
   front_steps = 400

   def _backend(self):
      return pymoo_problem(self.name.lower(), n_var=self.n)

   def _positions(self, size: int) -> np.ndarray:
      if self.M == 2:
         return np.linspace(0, 1, max(4 * size, 2000))[:, None]
      k = int(np.ceil(np.sqrt(4 * size)))
      a, b = np.meshgrid(np.linspace(0, 1, k), np.linspace(0, 1, k), indexing="ij")
      return np.column_stack([a.ravel(), b.ravel()])

   def _front_lines(self, size):
      pos = self._positions(size)
      g = 1 + np.linspace(0, self.g_span, self.front_steps)
      F = self._objectives(pos[:, None, :], g[None, :])
      return F, np.all(self._constraints(F) <= 0, axis=-1)

   def _objectives(self, pos, g):
      raise NotImplementedError

   def _constraints(self, F):
      raise NotImplementedError


def _line_angle(F):
   return np.sqrt(2) * F[..., 1] - np.sqrt(2) * F[..., 0]


class MW1(MWProblem):

   def _objectives(self, pos, g):
      f1 = pos[..., 0]
      return stack_columns(f1, g - 0.85 * f1)

   def _constraints(self, F):
      l = _line_angle(F)
      return stack_columns(F[..., 0] + F[..., 1] - 1 - 0.5 * np.sin(2 * PI * l) ** 8)


class MW2(MWProblem):

   def _objectives(self, pos, g):
      f1 = pos[..., 0]
      return stack_columns(f1, g - f1)

   def _constraints(self, F):
      l = _line_angle(F)
      return stack_columns(F[..., 0] + F[..., 1] - 1 - 0.5 * np.sin(3 * PI * l) ** 8)


class MW3(MWProblem):
   p = 2

   def _objectives(self, pos, g):
      f1 = pos[..., 0]
      return stack_columns(f1, g - f1)

   def _constraints(self, F):
      l = _line_angle(F)
      total = F[..., 0] + F[..., 1]
      return stack_columns(
         total - 1.05 - 0.45 * np.sin(0.75 * PI * l) ** 6,
         0.85 - total + 0.3 * np.sin(0.75 * PI * l) ** 2,
      )


def _simplex(pos, g, M):
   """Linear front: f_k = g * prod(x_1..x_{M-1-k}) * (1 - x_{M-k})."""
   cols = []
   for k in range(M):
      value = g
      for j in range(M - 1 - k):
         value = value * pos[..., j]
      if k > 0:
         value = value * (1 - pos[..., M - 1 - k])
      cols.append(value)
   return stack_columns(*cols)


def _sphere(pos, g, M):
   cols = []
   for k in range(M):
      value = g
      for j in range(M - 1 - k):
         value = value * np.cos(0.5 * PI * pos[..., j])
      if k > 0:
         value = value * np.sin(0.5 * PI * pos[..., M - 1 - k])
      cols.append(value)
   return stack_columns(*cols)


class MW4(MWProblem):
   M = 3

   def _objectives(self, pos, g):
      return _simplex(pos, g, self.M)

   def _constraints(self, F):
      l = F[..., -1] - np.sum(F[..., :-1], axis=-1)
      return stack_columns(np.sum(F, axis=-1) - (1 + 0.4 * np.sin(2.5 * PI * l) ** 8))


class MW5(MWProblem):
   p = 3

   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(g * x1, g * np.sqrt(1 - x1 ** 2))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      l1 = np.arctan2(f2, f1)
      l2 = 0.5 * PI - 2 * np.abs(l1 - 0.25 * PI)
      r2 = f1 ** 2 + f2 ** 2
      return stack_columns(
         r2 - (1.7 - 0.2 * np.sin(2 * l1)) ** 2,
         (1 + 0.5 * np.sin(6 * l2 ** 3)) ** 2 - r2,
         (1 - 0.45 * np.sin(6 * l2 ** 3)) ** 2 - r2,
      )


class MW6(MWProblem):

   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(1.0999 * g * x1, g * np.sqrt(1.21 - (1.0999 * x1) ** 2))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      l = np.cos(6 * np.arctan2(f2, f1) ** 4) ** 10
      return stack_columns((f1 / (1 + 0.15 * l)) ** 2 + (f2 / (1 + 0.75 * l)) ** 2 - 1)


class MW7(MWProblem):
   p = 2

   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(g * x1, g * np.sqrt(1 - x1 ** 2))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      l = np.arctan2(f2, f1)
      r2 = f1 ** 2 + f2 ** 2
      return stack_columns(
         r2 - (1.2 + 0.4 * np.sin(4 * l) ** 16) ** 2,
         (1.15 - 0.2 * np.sin(4 * l) ** 8) ** 2 - r2,
      )


class MW8(MWProblem):
   M = 3

   def _objectives(self, pos, g):
      return _sphere(pos, g, self.M)

   def _constraints(self, F):
      norm = np.sqrt(np.sum(F ** 2, axis=-1))
      l = np.arcsin(np.clip(F[..., -1] / norm, -1, 1))
      return stack_columns(norm ** 2 - (1.25 - 0.5 * np.sin(6 * l) ** 2) ** 2)


class MW9(MWProblem):

   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(g * x1, g * (1 - x1 ** 0.6))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      t1 = (1 - 0.64 * f1 ** 2 - f2) * (1 - 0.36 * f1 ** 2 - f2)
      t2 = 1.35 ** 2 - (f1 + 0.35) ** 2 - f2
      t3 = 1.15 ** 2 - (f1 + 0.15) ** 2 - f2
      return stack_columns(np.minimum(t1, t2 * t3))


class MW10(MWProblem):
   p = 3

   def _objectives(self, pos, g):
      power = pos[..., 0] ** self.n
      return stack_columns(g * power, g * (1 - power ** 2))

   def _positions(self, size):
      # x1**n compresses the front towards f1 = 0
      return np.linspace(0, 1, max(4 * size, 2000))[:, None] ** (1 / self.n)

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      return stack_columns(
         -(2 - 4 * f1 ** 2 - f2) * (2 - 8 * f1 ** 2 - f2),
         (2 - 2 * f1 ** 2 - f2) * (2 - 16 * f1 ** 2 - f2),
         (1 - f1 ** 2 - f2) * (1.2 - 1.2 * f1 ** 2 - f2),
      )


class MW11(MWProblem):
   p = 4

   def _objectives(self, pos, g):
      scaled = pos[..., 0] * np.sqrt(1.9999)
      return stack_columns(g * scaled, g * np.sqrt(2 - scaled ** 2))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      return stack_columns(
         -(3 - f1 ** 2 - f2) * (3 - 2 * f1 ** 2 - f2),
         (3 - 0.625 * f1 ** 2 - f2) * (3 - 7 * f1 ** 2 - f2),
         -(1.62 - 0.18 * f1 ** 2 - f2) * (1.125 - 0.125 * f1 ** 2 - f2),
         (2.07 - 0.23 * f1 ** 2 - f2) * (0.63 - 0.07 * f1 ** 2 - f2),
      )


class MW12(MWProblem):
   p = 2

   def _objectives(self, pos, g):
      x1 = pos[..., 0]
      return stack_columns(g * x1, g * (0.85 - 0.8 * x1 - 0.08 * np.abs(np.sin(3.2 * PI * x1))))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      return stack_columns(
         -(1 - 0.625 * f1 - f2 + 0.08 * np.sin(2 * PI * (f2 - f1 / 1.6)))
         * (1.4 - 0.875 * f1 - f2 + 0.08 * np.sin(2 * PI * (f2 / 1.4 - f1 / 1.6))),
         (1 - 0.8 * f1 - f2 + 0.08 * np.sin(2 * PI * (f2 - f1 / 1.5)))
         * (1.8 - 1.125 * f1 - f2 + 0.08 * np.sin(2 * PI * (f2 / 1.8 - f1 / 1.6))),
      )


class MW13(MWProblem):
   p = 2

   def _objectives(self, pos, g):
      x1 = 1.5 * pos[..., 0]
      return stack_columns(g * x1, g * (5 - np.exp(x1) - 0.5 * np.abs(np.sin(3 * PI * x1))))

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      wave = 0.5 * np.sin(3 * PI * f1)
      return stack_columns(
         -(5 - (1 + f1 + 0.5 * f1 ** 2) - wave - f2) * (5 - (1 + 0.7 * f1) - wave - f2),
         (5 - np.exp(f1) - wave - f2) * (5 - (1 + 0.4 * f1) - wave - f2),
      )


class MW14(MWProblem):
   M = 3

   def _objectives(self, pos, g):
      head = 1.5 * pos
      tail = g / (self.M - 1) * np.sum(6 - np.exp(head) - 1.5 * np.sin(1.1 * PI * head ** 2), axis=-1)
      return stack_columns(*[head[..., k] for k in range(self.M - 1)], tail)

   def _constraints(self, F):
      head = F[..., :-1]
      bound = np.sum(6.1 - 1 - head - 0.5 * head ** 2 - 1.5 * np.sin(1.1 * PI * head ** 2), axis=-1) / (self.M - 1)
      return stack_columns(F[..., -1] - bound)


MW_PROBLEMS = {cls.__name__: cls for cls in (MW1, MW2, MW3, MW4, MW5, MW6, MW7, MW8, MW9, MW10, MW11, MW12, MW13, MW14)}
