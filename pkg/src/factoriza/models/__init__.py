"""データモデル定義のパッケージ"""
