from problems.fronts.front_manager import FrontManager, load_reference_front

__all__ = ["FrontManager", "load_reference_front"]
