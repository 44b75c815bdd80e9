# Copyright 2026 The PhyFea Engine Authors
# SPDX-License-Identifier: Apache-2.0
"""Physical-feasibility penalty for semantic segmentation scores."""

from ._core import ValidationError, penalty_forward_backward, version_info

__all__ = ["ValidationError", "penalty_forward_backward", "version_info"]
