public class Main {
  public static void main(String[] args) {
    int h = 7;
    System.out.println(h)
    h = 0;
  }
}
