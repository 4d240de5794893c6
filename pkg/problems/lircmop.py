"""
LIRCMOP constrained benchmark suite (LIRCMOP1-LIRCMOP14).
"""
import numpy as np
from problems.problem import ProblemDefinition, stack_columns

PI = np.pi
THETA = -0.25 * PI
ALPHA = 0.25 * PI


def _h_square(x1):
   return 1 - x1 ** 2


def _h_sqrt(x1):
   return 1 - np.sqrt(x1)


def _ellipse(f1, f2, p, q, a, b) -> np.ndarray:
   """Rotated ellipse quadratic form; values below r lie inside the infeasible ellipse."""
   dx = f1 - p
   dy = f2 - q
   return (dx * np.cos(THETA) - dy * np.sin(THETA)) ** 2 / a ** 2 + (dx * np.sin(THETA) + dy * np.cos(THETA)) ** 2 / b ** 2


class LIRCMOPProblem(ProblemDefinition):
   h = staticmethod(_h_square)
   front_lines = 4000
   front_steps = 600


class _BoxedBand(LIRCMOPProblem):
   """LIRCMOP1-4: both distance sums confined to the band [0.5, 0.51]."""
   p = 2

   def _distances(self, X):
      x1 = X[:, :1]
      g1 = np.sum((X[:, 2::2] - np.sin(0.5 * PI * x1)) ** 2, axis=1)
      g2 = np.sum((X[:, 1::2] - np.cos(0.5 * PI * x1)) ** 2, axis=1)
      return g1, g2

   def _evaluate(self, X):
      g1, g2 = self._distances(X)
      x1 = X[:, 0]
      F = stack_columns(x1 + g1, self.h(x1) + g2)
      cons = [(0.5 - g1) * (0.51 - g1), (0.5 - g2) * (0.51 - g2)]
      if self.p == 3:
         cons.append(0.5 - np.sin(20 * PI * x1))
      return F, stack_columns(*cons)

   def _front_lines(self, size):
      x1 = np.linspace(0, 1, max(4 * size, self.front_lines))
      F = stack_columns(x1 + 0.5, self.h(x1) + 0.5)[:, None, :]
      feasible = np.ones(F.shape[:2], dtype=bool)
      if self.p == 3:
         feasible[:, 0] = np.sin(20 * PI * x1) >= 0.5
      return F, feasible


class LIRCMOP1(_BoxedBand):
   h = staticmethod(_h_square)


class LIRCMOP2(_BoxedBand):
   h = staticmethod(_h_sqrt)


class LIRCMOP3(_BoxedBand):
   p = 3
   h = staticmethod(_h_square)


class LIRCMOP4(_BoxedBand):
   p = 3
   h = staticmethod(_h_sqrt)


def _angled_distances(X):
   n = X.shape[1]
   j = np.arange(2, n + 1)
   angle = 0.5 * j / n * PI * X[:, :1]
   rest = X[:, 1:]
   odd = (j % 2 == 1)
   g1 = np.sum(((rest - np.sin(angle)) ** 2)[:, odd], axis=1)
   g2 = np.sum(((rest - np.cos(angle)) ** 2)[:, ~odd], axis=1)
   return g1, g2


class _EllipseField(LIRCMOPProblem):
   """LIRCMOP5-8: a shifted front obstructed by a row of rotated ellipses."""
   p = 2
   offset = 0.7057
   r = 0.1
   centers = ((1.6, 1.6), (2.5, 2.5))
   axes = ((2.0, 4.0), (2.0, 8.0))

   def _evaluate(self, X):
      g1, g2 = _angled_distances(X)
      x1 = X[:, 0]
      F = stack_columns(x1 + 10 * g1 + self.offset, self.h(x1) + 10 * g2 + self.offset)
      return F, self._constraints(F)

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      return stack_columns(*[
         self.r - _ellipse(f1, f2, p, q, a, b)
         for (p, q), (a, b) in zip(self.centers, self.axes)
      ])

   def _envelope(self, f1):
      return self.h(np.clip(f1 - self.offset, 0, 1)) + self.offset

   def _front_lines(self, size):
      f1 = self.offset + np.linspace(0, 1.5, max(4 * size, self.front_lines))
      step = np.linspace(0, 1.5, self.front_steps)
      f2 = self._envelope(f1)[:, None] + step[None, :]
      F = stack_columns(f1[:, None], f2)
      return F, np.all(self._constraints(F) <= 0, axis=-1)


class LIRCMOP5(_EllipseField):
   h = staticmethod(_h_sqrt)


class LIRCMOP6(_EllipseField):
   h = staticmethod(_h_square)
   centers = ((1.8, 1.8), (2.8, 2.8))
   axes = ((2.0, 8.0), (2.0, 8.0))


class LIRCMOP7(_EllipseField):
   p = 3
   h = staticmethod(_h_sqrt)
   centers = ((1.2, 1.2), (2.25, 2.25), (3.5, 3.5))
   axes = ((2.0, 6.0), (2.5, 12.0), (2.5, 10.0))


class LIRCMOP8(_EllipseField):
   p = 3
   h = staticmethod(_h_square)
   centers = ((1.2, 1.2), (2.25, 2.25), (3.5, 3.5))
   axes = ((2.0, 6.0), (2.5, 12.0), (2.5, 10.0))


class _EllipseWave(LIRCMOPProblem):
   """LIRCMOP9-12: one rotated ellipse plus a sinusoidal band across the front."""
   p = 2
   scale = 1.7057
   r = 0.1
   center = (1.4, 1.4)
   axes = (1.5, 6.0)
   k = 2.0

   def _evaluate(self, X):
      g1, g2 = _angled_distances(X)
      x1 = X[:, 0]
      F = stack_columns(self.scale * x1 * (10 * g1 + 1), self.scale * self.h(x1) * (10 * g2 + 1))
      return F, self._constraints(F)

   def _constraints(self, F):
      f1, f2 = F[..., 0], F[..., 1]
      ellipse = self.r - _ellipse(f1, f2, *self.center, *self.axes)
      along = f1 * np.sin(ALPHA) + f2 * np.cos(ALPHA)
      across = f1 * np.cos(ALPHA) - f2 * np.sin(ALPHA)
      return stack_columns(ellipse, self.k - along + np.sin(4 * PI * across))

   def _front_lines(self, size):
      f1 = np.linspace(0, 1.5 * self.scale, max(4 * size, self.front_lines))
      envelope = self.scale * self.h(np.clip(f1 / self.scale, 0, 1))
      step = np.linspace(0, 2.0, self.front_steps)
      F = stack_columns(f1[:, None], envelope[:, None] + step[None, :])
      return F, np.all(self._constraints(F) <= 0, axis=-1)


class LIRCMOP9(_EllipseWave):
   h = staticmethod(_h_square)


class LIRCMOP10(_EllipseWave):
   h = staticmethod(_h_sqrt)
   center = (1.1, 1.2)
   axes = (2.0, 4.0)
   k = 1.0


class LIRCMOP11(_EllipseWave):
   h = staticmethod(_h_sqrt)
   center = (1.2, 1.2)
   axes = (1.5, 5.0)
   k = 2.1


class LIRCMOP12(_EllipseWave):
   h = staticmethod(_h_sqrt)
   center = (1.6, 1.6)
   axes = (1.5, 6.0)
   k = 2.5


class _Shells(LIRCMOPProblem):
   """LIRCMOP13-14: three-objective sphere with forbidden radial shells."""
   p = 2
   M = 3
   radius = 1.7057
   shells = ((9.0, 4.0), (3.61, 3.24))

   def _sphere(self, x1, x2, radius):
      c1 = np.cos(0.5 * PI * x1)
      return stack_columns(radius * c1 * np.cos(0.5 * PI * x2), radius * c1 * np.sin(0.5 * PI * x2), radius * np.sin(0.5 * PI * x1))

   def _evaluate(self, X):
      radius = self.radius + np.sum(10 * (X[:, 2:] - 0.5) ** 2, axis=1)
      F = self._sphere(X[:, 0], X[:, 1], radius)
      return F, self._constraints(F)

   def _constraints(self, F):
      gx = np.sum(F ** 2, axis=-1)
      return stack_columns(*[(gx - hi) * (lo - gx) for hi, lo in self.shells])

   def _front_lines(self, size):
      k = int(np.ceil(np.sqrt(4 * size)))
      a, b = np.meshgrid(np.linspace(0, 1, k), np.linspace(0, 1, k), indexing="ij")
      radius = self.radius + np.linspace(0, 1.5, self.front_steps)
      F = self._sphere(a.ravel()[:, None], b.ravel()[:, None], radius[None, :])
      return F, np.all(self._constraints(F) <= 0, axis=-1)


class LIRCMOP13(_Shells):
   pass


class LIRCMOP14(_Shells):
   p = 3
   shells = ((9.0, 4.0), (3.61, 3.24), (3.0625, 2.56))


LIRCMOP_PROBLEMS = {cls.__name__: cls for cls in (
   LIRCMOP1, LIRCMOP2, LIRCMOP3, LIRCMOP4, LIRCMOP5, LIRCMOP6, LIRCMOP7,
   LIRCMOP8, LIRCMOP9, LIRCMOP10, LIRCMOP11, LIRCMOP12, LIRCMOP13, LIRCMOP14,
)}
