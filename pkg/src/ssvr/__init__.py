"""Smooth epsilon-support vector regression solved by Newton-Armijo."""

from .data import Dataset, load_csv, make_folds, similarity_split
from .kernel import KernelSpec
from .model import GridSpec, TrainedModel, cross_validate, fit, grid_search, load_model, predict, save_model
from .objective import Hyperparams, ModelParams, Problem
from .solver import SolverConfig, SolverReport, minimize

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "GridSpec",
    "Hyperparams",
    "KernelSpec",
    "ModelParams",
    "Problem",
    "SolverConfig",
    "SolverReport",
    "TrainedModel",
    "cross_validate",
    "fit",
    "grid_search",
    "load_csv",
    "load_model",
    "make_folds",
    "minimize",
    "predict",
    "save_model",
    "similarity_split",
]
