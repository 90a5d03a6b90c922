"""platoonsim: microscopic corridor simulator for delivery-van platooning.

Compares a connected CACC platoon (beacon-coupled, sinusoidal leader cruise)
against independent Krauss-driven vans on the same route, accounting travel
time, pollutant emissions (CO2, CO, NOx, HC) and fuel consumption per step.
"""

__version__ = "0.1.0"
