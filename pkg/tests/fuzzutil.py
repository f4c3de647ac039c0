"""Schema-violating argument generation for the tool-call gate tests."""

from bagpilot.mcp.registry import TOOLS

_VALID_BY_TYPE = {
    "string": "/odom",
    "number": 1.0,
    "integer": 5,
    "boolean": True,
    "array": ["cmd_vel.linear.x"],
}

_BOGUS_BY_TYPE = [
    {"string": 12345, "number": "not-a-number", "integer": "five",
     "boolean": "yes", "array": "not-an-array"},
    {"string": ["nested"], "number": {"v": 1}, "integer": 1.5,
     "boolean": 7, "array": {"a": 1}},
    {"string": None, "number": None, "integer": None,
     "boolean": None, "array": None},
]


def _valid_value(prop_schema: dict):
    if "enum" in prop_schema:
        return prop_schema["enum"][0]
    return _VALID_BY_TYPE[prop_schema["type"]]


def valid_arguments(tool) -> dict:
    return {
        name: _valid_value(tool.input_schema["properties"][name])
        for name in tool.input_schema["required"]
    }


def invalid_argument_cases() -> list[tuple[str, dict, str]]:
    """(tool_name, arguments, offending_field) triples, every tool covered."""
    cases = []
    for tool in TOOLS:
        base = valid_arguments(tool)
        for name in tool.input_schema["required"]:
            broken = {k: v for k, v in base.items() if k != name}
            cases.append((tool.name, broken, name))
        for name, prop in tool.input_schema["properties"].items():
            for bogus in _BOGUS_BY_TYPE:
                args = dict(base)
                args[name] = bogus[prop["type"]]
                cases.append((tool.name, args, name))
    return cases
