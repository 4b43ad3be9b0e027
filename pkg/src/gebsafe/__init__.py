"""Safe DQN control of a 4R4C building with HVAC, rooftop PV and a battery."""

__version__ = "0.1.0"
