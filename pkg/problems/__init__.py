from problems.problem import (
   DomainError,
   EvaluatedSolution,
   ProblemDefinition,
   UnknownProblemError,
   evaluate,
)
from problems.sampling import lhs_sample
from problems.mw import MW_PROBLEMS
from problems.lircmop import LIRCMOP_PROBLEMS
from problems.dascmop import DASCMOP_PROBLEMS

PROBLEMS: dict[str, type[ProblemDefinition]] = {**MW_PROBLEMS, **LIRCMOP_PROBLEMS, **DASCMOP_PROBLEMS}


def get_problem(name: str, n: int = 10) -> ProblemDefinition:
   """
   Builds a suite problem by name (case-insensitive).

   Raises:
      UnknownProblemError: If no suite ships a problem with that name.
   """
   key = str(name).strip().upper()
   if key not in PROBLEMS:
      raise UnknownProblemError(f"Unknown problem: {name}")
   return PROBLEMS[key](n)


def list_problems(n: int = 10) -> list[dict]:
   rows = []
   for key in PROBLEMS:
      problem = get_problem(key, n)
      rows.append({"name": key, "n": problem.n, "M": problem.M, "p": problem.p, **problem.metadata})
   return rows


__all__ = [
   "DomainError",
   "EvaluatedSolution",
   "ProblemDefinition",
   "UnknownProblemError",
   "PROBLEMS",
   "evaluate",
   "get_problem",
   "list_problems",
   "lhs_sample",
]
