"""fgwpos: a deterministic 2D flying-gateway positioning laboratory.

Relay-link simulation with Minstrel-style rate adaptation, an episodic
decision environment, a numpy deep Q-learning agent, geometric baseline
policies, and a reproducible CLI."""

__version__ = "0.1.0"
