"""Real-time musical biofeedback engine for movement training.

Converts streamed inertial sensor data into adjustable musical feedback:
balance zones, trajectory tracking, sit-to-stand smoothness and gait
synchronization, with a sensor simulator, session logging and a live
operator console.
"""

__version__ = "0.1.0"
