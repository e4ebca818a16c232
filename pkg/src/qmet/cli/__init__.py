"""Scenario runner: builtin suites, scenario files and reports."""
