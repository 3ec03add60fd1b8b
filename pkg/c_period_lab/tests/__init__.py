# Tests 패키지
