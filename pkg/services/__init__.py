"""mockrad 계산 서비스 모음"""
