"""
Test suite for the canrp toolkit

Run tests with: pytest tests/
Run with coverage: pytest tests/ --cov=. --cov-report=html
"""
