# services/reference/published_tables.py
from typing import Dict, List


class PublishedTables:
    """n = 5 에서 출판된 수치표 (𝒜₁, 𝒜₂, 𝒜₃ 누적값과 합, N = 1, 2, 3).

    μ = 0 과 μ = ±1 두 표.
    표 1 은 소수 넷째 자리, 표 2 는 셋째 자리까지 인쇄되어 있다.
    """

    N_VALUES: List[int] = [1, 2, 3]

    TABLES: Dict[int, Dict] = {
        0: {
            "n": 5,
            "exact": 1512,
            "decimals": 4,
            "rows": {
                "A1": [21840.0401, 21843.2723, 21843.0363],
                "A2": [-32806.5410, -32811.3140, -32810.8548],
                "A3": [12478.4547, 12480.0457, 12479.8193],
                "total": [1511.9538, 1512.0039, 1512.0008],
            },
        },
        1: {
            "n": 5,
            "exact": 40881,
            "decimals": 3,
            "rows": {
                "A1": [221918.638, 221910.095, 221910.095],
                "A2": [-255562.432, -255548.451, -255548.537],
                "A3": [74525.064, 74519.364, 74519.440],
                "total": [40881.270, 40881.008, 40880.998],
            },
        },
    }

    # 셀 단위 허용 오차 (절대값)
    CELL_TOLERANCE = 5e-3

    @classmethod
    def table(cls, mu: int) -> Dict:
        return cls.TABLES[0 if mu == 0 else 1]
