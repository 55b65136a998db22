"""Exact controllability-robustness curves and a learned curve predictor."""

from ._core import (
    Graph,
    InputError,
    NumericError,
    ShapeError,
    betweenness,
    build_dataset,
    curve_metrics,
    dataset_curves,
    evaluate,
    evaluate_curves,
    generate,
    max_matching_size,
    min_driver_nodes,
    min_driver_nodes_undirected,
    predict,
    pretrain_bc,
    simulate,
    train,
)

__all__ = [
    "Graph",
    "InputError",
    "NumericError",
    "ShapeError",
    "betweenness",
    "build_dataset",
    "curve_metrics",
    "dataset_curves",
    "evaluate",
    "evaluate_curves",
    "generate",
    "max_matching_size",
    "min_driver_nodes",
    "min_driver_nodes_undirected",
    "predict",
    "pretrain_bc",
    "simulate",
    "train",
]
