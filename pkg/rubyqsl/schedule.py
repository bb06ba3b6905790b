''' Quasi-adiabatic sweep schedules '''

from __future__ import annotations
from typing import Optional
from dataclasses import dataclass, replace
import math

from scipy.optimize import brentq


def cubic(s: float) -> float:
    ''' Hermite cubic from 0 to 1 with zero slope at both ends '''
    return s*s*(3 - 2*s)


@dataclass(frozen=True)
class SweepSchedule:
    ''' Linear Omega ramp-on, cubic detuning sweep, optional Omega ramp-down

        Attributes
        ----------
        omega_max: Rabi frequency after the ramp-on (rad/us)
        delta_min: Detuning during the ramp-on and at the start of the sweep
        delta_max: Detuning at the end of the full cubic sweep
        t_ramp_on: Duration of the linear Omega ramp (us)
        t_sweep: Duration of the full cubic detuning sweep (us)
        t_ramp_down: Duration of the final linear Omega ramp to zero (us)
        stop: Fraction (0-1] of the cubic sweep performed before stopping
    '''
    omega_max: float
    delta_min: float
    delta_max: float
    t_ramp_on: float
    t_sweep: float
    t_ramp_down: float = 0.0
    stop: float = 1.0

    def __post_init__(self):
        if self.omega_max < 0:
            raise ValueError(f'omega_max must be nonnegative, got {self.omega_max}')
        if self.delta_max < self.delta_min:
            raise ValueError('Detuning sweep must be nondecreasing '
                             f'({self.delta_min} -> {self.delta_max})')
        if min(self.t_ramp_on, self.t_ramp_down) < 0 or self.t_sweep <= 0:
            raise ValueError('Segment durations must be nonnegative, with a positive sweep')
        if not 0 <= self.stop <= 1:
            raise ValueError(f'Sweep stop fraction must lie in [0, 1], got {self.stop}')

    @property
    def t_stop(self) -> float:
        ''' Time at which the detuning sweep stops '''
        return self.t_ramp_on + self.stop*self.t_sweep

    @property
    def t_total(self) -> float:
        return self.t_stop + self.t_ramp_down

    @property
    def delta_end(self) -> float:
        ''' Detuning where the sweep stops '''
        return self.delta_min + (self.delta_max - self.delta_min)*cubic(self.stop)

    def evaluate(self, t: float) -> tuple[float, float]:
        ''' (Omega, Delta) at time t '''
        eps = 1E-12 * max(1.0, self.t_total)
        if t < -eps or t > self.t_total + eps:
            raise ValueError(f'Time {t} outside schedule [0, {self.t_total}]')
        t = min(max(t, 0.0), self.t_total)
        if t < self.t_ramp_on:
            return self.omega_max * t / self.t_ramp_on, self.delta_min
        if t <= self.t_stop:
            s = (t - self.t_ramp_on) / self.t_sweep
            return self.omega_max, self.delta_min + (self.delta_max - self.delta_min)*cubic(s)
        frac = (t - self.t_stop) / self.t_ramp_down
        return self.omega_max*(1 - frac), self.delta_end

    def truncated(self, delta_end: float) -> 'SweepSchedule':
        ''' Same schedule, stopping the cubic sweep where Delta = delta_end '''
        tol = 1E-9 * max(1.0, abs(self.delta_min), abs(self.delta_max))
        if delta_end < self.delta_min - tol or delta_end > self.delta_max + tol:
            raise ValueError(f'Endpoint detuning {delta_end} outside schedule range '
                             f'[{self.delta_min}, {self.delta_max}]')
        span = self.delta_max - self.delta_min
        if span == 0 or delta_end >= self.delta_max:
            stop = 1.0
        elif delta_end <= self.delta_min:
            stop = 0.0
        else:
            stop = brentq(lambda s: self.delta_min + span*cubic(s) - delta_end, 0, 1, xtol=1E-14)
        return replace(self, stop=stop)

    def at_endpoint(self, endpoint: float) -> 'SweepSchedule':
        ''' Truncate at a final detuning given as Delta/Omega_max '''
        if self.omega_max == 0:
            raise ValueError('Endpoints in units of Omega need omega_max > 0')
        return self.truncated(endpoint * self.omega_max)

    def endpoint_range(self) -> tuple[float, float]:
        ''' Allowed Delta/Omega_max endpoints '''
        return self.delta_min/self.omega_max, self.delta_max/self.omega_max


def schedule_eval(s: SweepSchedule, t: float) -> tuple[float, float]:
    ''' (Omega, Delta) of schedule s at time t '''
    return s.evaluate(t)


def default_schedule(t_ramp_down: float = 0.2) -> SweepSchedule:
    ''' Experimental-scale sweep: Omega = 2 pi x 1.4 MHz reached in 0.25 us,
        cubic detuning from -2 pi x 4 MHz up to 6 Omega over 1.8 us
    '''
    omega = 2*math.pi*1.4
    return SweepSchedule(omega_max=omega, delta_min=-2*math.pi*4, delta_max=6*omega,
                         t_ramp_on=0.25, t_sweep=1.8, t_ramp_down=t_ramp_down)


def dimensionless_schedule(total: float, delta_min: float = -3.0, delta_max: float = 5.0,
                           ramp_fraction: float = 0.1,
                           omega: Optional[float] = None) -> SweepSchedule:
    ''' Sweep of total length `total` in units of 1/Omega, with Omega = 1
        (or `omega`) and detunings given in units of Omega
    '''
    omega = 1.0 if omega is None else omega
    t = total / omega
    return SweepSchedule(omega_max=omega, delta_min=delta_min*omega, delta_max=delta_max*omega,
                         t_ramp_on=ramp_fraction*t, t_sweep=(1 - ramp_fraction)*t)
