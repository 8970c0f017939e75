# Z is not compact
init X
X -> X X : 0.3
X -> Z : 0.2
X -> : 0.5
Z -> : 1
