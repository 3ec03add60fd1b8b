# Core 모듈
