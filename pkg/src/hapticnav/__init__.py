"""Temple-haptics navigation engine.

Turns camera object detections into a coarse spatial picture, decides a
navigation command, and renders it as tactile patterns on a pair of
temple-mounted five-bar linkage actuators. Includes a deterministic 2D
simulator, a command line, and a WebSocket gateway for interactive runs.
"""

__version__ = "0.1.0"
