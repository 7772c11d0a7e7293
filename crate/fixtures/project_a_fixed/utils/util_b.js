class Car {
    constructor(name, age) {
        this.name = name;
        this.age = age;
    }
    drive(distance, direction) {
        return distance + ":" + direction;
    }
}
var item_list = {
    apples: 3,
    pears: 5
};
function buy(item) {
    item_list[item] -= 1;
    return item_list[item];
}
