"""Base change for relative dualizing modules, computed exactly."""
