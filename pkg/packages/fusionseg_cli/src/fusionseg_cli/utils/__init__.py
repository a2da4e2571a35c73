"""Utility modules for fusionseg_cli"""
