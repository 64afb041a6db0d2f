# services/quadrature_service.py
"""결정적 고차 구적 규칙: [-1,1], 타원 영역 Q(w) ≤ 1, 잘린 실직선/실평면"""

import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre

from services.models import QuadratureRule

SQRT3 = math.sqrt(3.0)
# Q(w) = |A·w|², A = (1, 1/2; 0, √3/2)
A_INVERSE = np.array([[1.0, -1.0 / SQRT3], [0.0, 2.0 / SQRT3]])
JACOBIAN = 2.0 / SQRT3


@lru_cache(maxsize=32)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order: int) -> QuadratureRule:
    if order < 1:
        raise ValueError("order must be at least 1")
    nodes, weights = _legendre(order)
    return QuadratureRule(nodes=nodes.copy(), weights=weights.copy(), kind="interval", order=order)


def mapped_gauss_legendre(lower: float, upper: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """[lower, upper] 로 옮긴 노드/가중치"""
    nodes, weights = _legendre(order)
    half = 0.5 * (upper - lower)
    return lower + half * (nodes + 1.0), half * weights


def _disk_rule(radial_order: int, angular_order: int) -> Tuple[np.ndarray, np.ndarray]:
    # ρ = r² 에 대한 Gauss-Legendre × 각도 사다리꼴, 면적요소 r dr dθ = dρ dθ / 2
    rho, rho_weights = mapped_gauss_legendre(0.0, 1.0, radial_order)
    theta = 2.0 * math.pi * (np.arange(angular_order) + 0.5) / angular_order
    radius = np.sqrt(rho)
    v1 = np.outer(radius, np.cos(theta)).ravel()
    v2 = np.outer(radius, np.sin(theta)).ravel()
    weights = np.outer(0.5 * rho_weights, np.full(angular_order, 2.0 * math.pi / angular_order)).ravel()
    return np.column_stack([v1, v2]), weights


def elliptic_region_rule(radial_order: int, angular_order: int, scale: float = 1.0) -> QuadratureRule:
    """{Q(w) ≤ scale²} 위의 규칙. 전체 가중치 합 = (2π/√3)·scale²."""
    if radial_order < 1 or angular_order < 1:
        raise ValueError("orders must be at least 1")
    disk_nodes, disk_weights = _disk_rule(radial_order, angular_order)
    nodes = scale * disk_nodes @ A_INVERSE.T
    weights = JACOBIAN * scale * scale * disk_weights
    return QuadratureRule(nodes=nodes, weights=weights, kind="elliptic-region", order=radial_order)


def gaussian_half_width(rate: float, tail_eps: float) -> float:
    """e^{-rate·W²} < tail_eps 가 되는 W"""
    return math.sqrt(math.log(1.0 / tail_eps) / rate)


def truncated_line_rule(half_width: float, order: int) -> QuadratureRule:
    nodes, weights = mapped_gauss_legendre(-half_width, half_width, order)
    return QuadratureRule(nodes=nodes, weights=weights, kind="real-line", order=order)


def truncated_plane_rule(half_width: float, order: int, dim: int = 2) -> QuadratureRule:
    """Q 에 맞춘 실평면 규칙: v = A·w 좌표의 정사각형 [-W, W]² 위 텐서 Gauss-Legendre.

    e^{-c·Q(w)} = e^{-c|v|²} 가 등방이 되므로 W 는 1차원과 같은 방식으로 고른다.
    """
    if dim == 1:
        return truncated_line_rule(half_width, order)
    nodes, weights = mapped_gauss_legendre(-half_width, half_width, order)
    v1, v2 = np.meshgrid(nodes, nodes, indexing="ij")
    disk_nodes = np.column_stack([v1.ravel(), v2.ravel()])
    plane_weights = JACOBIAN * np.outer(weights, weights).ravel()
    return QuadratureRule(
        nodes=disk_nodes @ A_INVERSE.T,
        weights=plane_weights,
        kind="real-plane",
        order=order,
    )


def integrate(rule: QuadratureRule, values: np.ndarray):
    return rule.integrate(values)
