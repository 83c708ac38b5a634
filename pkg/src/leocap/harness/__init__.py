"""Scenario configuration, experiment drivers and the ``leocap`` CLI."""
