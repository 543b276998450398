"""Paquete de pruebas para spin_squeezing."""
