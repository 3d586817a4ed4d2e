"""tickcheck: bounded SMT verification of logical-clock timing constraints
over Simulink/Stateflow-style models."""

__version__ = "0.1.0"
