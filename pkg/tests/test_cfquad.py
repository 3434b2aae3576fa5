import random
from fractions import Fraction

import pytest

from valdyn import QN, cf_expand, quadra_interval
from valdyn.errors import ValdynError


def test_cf_golden():
    pre, per = cf_expand((QN.of(1) + QN.sqrt_of(5)) / 2)
    assert pre == []
    assert per == [1]


def test_cf_sqrt2():
    pre, per = cf_expand(QN.sqrt_of(2))
    assert pre == [1]
    assert per == [2]


def test_cf_sqrt22():
    pre, per = cf_expand(QN.sqrt_of(22))
    assert pre == [4]
    assert per == [1, 2, 4, 2, 1, 8]


def test_cf_rejects_rational():
    with pytest.raises(ValdynError):
        cf_expand(QN.of(Fraction(3, 2)))


def interval_invariants(iv):
    p, q, p2, q2 = iv.p, iv.q, iv.p2, iv.q2
    assert p2 * q - p * q2 == 1
    lo, hi = QN.of(Fraction(p, q)), QN.of(Fraction(p2, q2))
    assert lo < iv.t_plus < hi
    a, b, c, d = iv.matrix
    for end in (lo, hi):
        img = (QN.of(a) * end + b) / (QN.of(c) * end + d)
        assert lo <= img <= hi


def test_quadra_fibonacci():
    iv = quadra_interval(1, 1, 1, 0, size_floor=10)
    interval_invariants(iv)
    assert min(iv.q, iv.q2) > 10
    assert iv.t_plus == (QN.of(1) + QN.sqrt_of(5)) / 2


def test_quadra_worked_segment_map():
    # t -> 7/(2+3t), fixed point (sqrt(22)-1)/3, just above 1
    iv = quadra_interval(0, 7, 3, 2)
    interval_invariants(iv)
    assert iv.t_plus == (QN.sqrt_of(22) - 1) / 3


def test_quadra_size_floor_grows():
    small = quadra_interval(2, 1, 1, 1)
    big = quadra_interval(2, 1, 1, 1, size_floor=100)
    interval_invariants(small)
    interval_invariants(big)
    assert min(big.q, big.q2) > 100


def test_quadra_rejects_rational_fixed_point():
    with pytest.raises(ValdynError):
        quadra_interval(2, 0, 0, 1)
    with pytest.raises(ValdynError):
        quadra_interval(1, 2, 0, 1)


def test_quadra_randomized():
    rng = random.Random(23)
    done = 0
    while done < 30:
        a, b, c, d = (rng.randint(0, 9) for _ in range(4))
        try:
            iv = quadra_interval(a, b, c, d)
        except ValdynError:
            continue
        interval_invariants(iv)
        done += 1
