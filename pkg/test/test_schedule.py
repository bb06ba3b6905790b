''' Sweep schedule tests '''
import pytest

from rubyqsl.schedule import SweepSchedule, schedule_eval, cubic, dimensionless_schedule, default_schedule


SCHED = SweepSchedule(omega_max=2.0, delta_min=-4.0, delta_max=10.0, t_ramp_on=1.0, t_sweep=5.0)


def test_cubic():
    assert cubic(0) == 0
    assert cubic(1) == 1
    assert cubic(0.5) == pytest.approx(0.5)


def test_segments():
    assert schedule_eval(SCHED, 0) == (0, -4)
    assert schedule_eval(SCHED, 0.5) == pytest.approx((1.0, -4.0))
    assert schedule_eval(SCHED, 1.0) == pytest.approx((2.0, -4.0))
    assert schedule_eval(SCHED, 3.5) == pytest.approx((2.0, 3.0))
    assert schedule_eval(SCHED, 6.0) == pytest.approx((2.0, 10.0))
    with pytest.raises(ValueError):
        schedule_eval(SCHED, 6.5)
    with pytest.raises(ValueError):
        schedule_eval(SCHED, -1)


def test_ramp_down():
    s = SweepSchedule(1.0, -1.0, 1.0, 1.0, 2.0, t_ramp_down=1.0)
    assert s.t_total == pytest.approx(4)
    assert s.evaluate(3.5) == pytest.approx((0.5, 1.0))
    assert s.evaluate(4.0) == pytest.approx((0.0, 1.0))


@pytest.mark.parametrize('endpoint', [-2.0, 0.0, 1.5, 4.0, 5.0])
def test_endpoints(endpoint):
    s = SCHED.at_endpoint(endpoint)
    assert s.delta_end == pytest.approx(endpoint*2.0, abs=1E-9)
    assert s.evaluate(s.t_stop)[1] == pytest.approx(endpoint*2.0, abs=1E-9)


def test_endpoint_range():
    assert SCHED.endpoint_range() == (-2.0, 5.0)
    with pytest.raises(ValueError):
        SCHED.at_endpoint(6.0)
    with pytest.raises(ValueError):
        SweepSchedule(0.0, -1.0, 1.0, 1.0, 1.0).at_endpoint(0.5)


def test_invalid():
    with pytest.raises(ValueError):
        SweepSchedule(1.0, 2.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        SweepSchedule(1.0, -1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        SweepSchedule(-1.0, -1.0, 1.0, 1.0, 1.0)


def test_dimensionless():
    s = dimensionless_schedule(60)
    assert s.omega_max == 1
    assert s.t_total == pytest.approx(60)
    assert s.endpoint_range() == (-3.0, 5.0)
    assert default_schedule().t_total == pytest.approx(2.25)
