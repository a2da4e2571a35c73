"""Command modules for fusionseg_cli"""
