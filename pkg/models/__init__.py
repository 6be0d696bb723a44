"""Modeli podataka: konfiguracija run-a, stanje i energija"""
