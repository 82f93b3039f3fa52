from copresence.commands import ablate, evaluate, generate, predict, report, train

COMMANDS = [generate, train, evaluate, predict, report, ablate]

__all__ = ["COMMANDS"]
