"""
factoriza のトップレベルパッケージ
"""
