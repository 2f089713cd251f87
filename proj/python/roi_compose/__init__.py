# Copyright 2026 The roi-compose Authors
# SPDX-License-Identifier: Apache-2.0
"""Compositional rendering of voxel-grid radiance fields."""

from ._core import (
    Grid,
    RoiError,
    bake,
    compose,
    fixture_names,
    group_cameras,
    ingest_colmap,
    psnr,
    render,
    run_experiment,
    ssim,
    synth_reconstruction,
)

__all__ = [
    "Grid",
    "RoiError",
    "bake",
    "compose",
    "fixture_names",
    "group_cameras",
    "ingest_colmap",
    "psnr",
    "render",
    "run_experiment",
    "ssim",
    "synth_reconstruction",
]
