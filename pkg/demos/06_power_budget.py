"""Duty-cycled power budget of the receiver and CR2032 battery life."""

from chirpranging import RECEIVER_COMPONENTS, battery_life, duty_cycle_power
from chirpranging.power import raw_battery_life

b = duty_cycle_power(RECEIVER_COMPONENTS, active_time=0.001, period=1.0)
print(f"{'component':14s}{'active nW':>12s}{'passive nW':>12s}{'total nW':>12s}")
for name, a, p, t in b.rows():
    print(f"{name:14s}{a:12.1f}{p:12.1f}{t:12.1f}")
print(f"battery life {battery_life(b.total_nw):.2f} y (raw {raw_battery_life(b.total_nw):.2f} y)")
