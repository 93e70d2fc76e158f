"""
Duty-cycled power budget of the receiving node.

Currents are in microamps, powers in nanowatts. Start-up transients of the
regulator, amplifiers and ADC are not modelled.
"""

from dataclasses import dataclass, field
import math

from .errors import ParameterError

HOURS_PER_YEAR = 8766.0
#: Supply voltage consistent with every row of the published budget.
DEFAULT_SUPPLY_VOLTAGE = 3.6
CR2032_CAPACITY_MAH = 225.0
CR2032_SHELF_LIFE_YEARS = 8.5


@dataclass(frozen=True)
class ComponentBudget:
    name: str
    active_current: float
    passive_current: float

    def __post_init__(self):
        if self.active_current < 0 or self.passive_current < 0:
            raise ParameterError(f"{self.name}: currents must be >= 0")


RECEIVER_COMPONENTS = (
    ComponentBudget("LDO + MEMS", 113.1, 0.03),
    ComponentBudget("OPAMP 1", 81.5, 0.0),
    ComponentBudget("OPAMP 2", 81.5, 0.0),
    ComponentBudget("ADC (nRF52)", 300.0, 1.9),
)


@dataclass(frozen=True)
class ComponentPower:
    name: str
    active_nw: float
    passive_nw: float

    @property
    def total_nw(self):
        return self.active_nw + self.passive_nw


@dataclass(frozen=True)
class PowerBreakdown:
    components: tuple
    duty_cycle: float
    supply_voltage: float
    active_current_total: float = field(default=0.0)
    passive_current_total: float = field(default=0.0)

    @property
    def active_nw(self):
        return sum(c.active_nw for c in self.components)

    @property
    def passive_nw(self):
        return sum(c.passive_nw for c in self.components)

    @property
    def total_nw(self):
        return self.active_nw + self.passive_nw

    def rows(self):
        """Table rows: one per component plus a 'Total' row."""
        out = [(c.name, c.active_nw, c.passive_nw, c.total_nw) for c in self.components]
        out.append(("Total", self.active_nw, self.passive_nw, self.total_nw))
        return out


def duty_cycle_power(components=RECEIVER_COMPONENTS, supply_voltage=DEFAULT_SUPPLY_VOLTAGE,
                     active_time=0.001, period=1.0):
    """Average power of each component when active `active_time` per `period`.

    With duty cycle ``d = active_time / period``, a component draws
    ``V * I_active * d`` while awake and ``V * I_passive * (1 - d)`` asleep.
    """
    if not 0 < active_time <= period:
        raise ParameterError(f"need 0 < active_time <= period, got {active_time}, {period}")
    if not supply_voltage > 0:
        raise ParameterError(f"supply_voltage must be > 0, got {supply_voltage}")
    d = active_time / period
    # uA * V = uW; scale to nW
    rows = tuple(
        ComponentPower(c.name,
                       1e3 * supply_voltage * c.active_current * d,
                       1e3 * supply_voltage * c.passive_current * (1.0 - d))
        for c in components)
    return PowerBreakdown(rows, d, supply_voltage,
                          sum(c.active_current for c in components),
                          sum(c.passive_current for c in components))


def battery_life(total_power, capacity=CR2032_CAPACITY_MAH,
                 supply_voltage=DEFAULT_SUPPLY_VOLTAGE, shelf_life=CR2032_SHELF_LIFE_YEARS):
    """Years of operation, never more than the battery's shelf life.

    `total_power` is in nW and `capacity` in mAh.
    """
    if total_power < 0 or not capacity > 0 or not supply_voltage > 0:
        raise ParameterError("battery_life inputs must be positive")
    if total_power == 0:
        return shelf_life
    current_ua = total_power / supply_voltage / 1e3
    hours = capacity * 1e3 / current_ua
    return min(hours / HOURS_PER_YEAR, shelf_life)


def raw_battery_life(total_power, capacity=CR2032_CAPACITY_MAH,
                     supply_voltage=DEFAULT_SUPPLY_VOLTAGE):
    """Battery life ignoring shelf life."""
    return battery_life(total_power, capacity, supply_voltage, math.inf)
