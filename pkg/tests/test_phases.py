import numpy as np
import pytest

from shockflow.errors import InvalidSchedule, ZeroLengthSchedule
from shockflow.phases import Phase, PhaseSchedule, PhaseSpec


def sched():
    return PhaseSchedule((PhaseSpec(Phase.PRE_SHOCK, 3, 0.2), PhaseSpec(Phase.SHOCK, 2, 0.1),
                          PhaseSpec(Phase.RECOVERY, 2, 0.7), PhaseSpec(Phase.POST_RECOVERY, 1, 0.3)))


def test_bookkeeping():
    s = sched()
    assert s.total_length == 8
    assert s.start_of(Phase.SHOCK) == 3
    assert s.start_of(Phase.POST_RECOVERY) == 7
    assert s.length_of(Phase.RECOVERY) == 2
    np.testing.assert_array_equal(s.day_lambdas(), [0.2] * 3 + [0.1] * 2 + [0.7] * 2 + [0.3])


def test_replace_lengths():
    s = sched().replace_lengths(shock=5, recovery=0)
    assert s.total_length == 9
    assert s.start_of(Phase.RECOVERY) is None


def test_order_enforced():
    with pytest.raises(InvalidSchedule):
        PhaseSchedule((PhaseSpec(Phase.SHOCK, 1, 0.1), PhaseSpec(Phase.PRE_SHOCK, 1, 0.1)))
    with pytest.raises(InvalidSchedule):
        PhaseSchedule((PhaseSpec(Phase.SHOCK, 1, 0.1), PhaseSpec(Phase.SHOCK, 1, 0.1)))


def test_zero_total():
    with pytest.raises(ZeroLengthSchedule):
        PhaseSchedule((PhaseSpec(Phase.SHOCK, 0, 0.1),))


@pytest.mark.parametrize("length, lam", [(-1, 0.1), (1.5, 0.1), (1, 1.2), (1, -0.1)])
def test_spec_validation(length, lam):
    with pytest.raises(InvalidSchedule):
        PhaseSpec(Phase.SHOCK, length, lam)


@pytest.mark.parametrize("label, kind", [("pre", Phase.PRE_SHOCK), ("Shock", Phase.SHOCK),
                                         ("post-recovery", Phase.POST_RECOVERY)])
def test_parse(label, kind):
    assert Phase.parse(label) is kind
