"""Coinductive extensive games: infinite games and strategy profiles as coalgebras."""
