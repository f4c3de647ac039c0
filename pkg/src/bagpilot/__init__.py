"""Robot log analysis toolkit: ROS1 bag parsing, analytics, plotting,
an MCP tool server, a synthetic fixture generator, and a tool-calling
benchmark harness."""

__version__ = "0.1.0"
